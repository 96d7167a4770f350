use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{iso_check, BasedAlgebra, IsoReport, Verdict};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Backtracking nodes before giving up.
    pub max_nodes: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_nodes: 5_000_000 }
    }
}

type Block = (usize, usize, u64);

fn block_counts(alg: &BasedAlgebra, rows: &[usize], cols: &[usize]) -> BTreeMap<Block, usize> {
    let mut out = BTreeMap::new();
    for i in 0..alg.len() {
        *out.entry((rows[alg.rows[i]], cols[alg.cols[i]], alg.grade[i])).or_insert(0) += 1;
    }
    out
}

/// Product fingerprint: the sorted constants of `x·x` when complete.
fn fingerprint(alg: &BasedAlgebra, x: usize) -> Option<Vec<u64>> {
    let p = alg.product(x, x);
    p.complete.then(|| p.sorted_coeffs())
}

/// All injections `0..k → 0..m` with `out[i] ∈ allowed[i]`, in
/// lexicographic order.
fn injections(allowed: &[Vec<usize>]) -> Vec<Vec<usize>> {
    fn go(allowed: &[Vec<usize>], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == allowed.len() {
            out.push(cur.clone());
            return;
        }
        for &c in &allowed[cur.len()] {
            if !cur.contains(&c) {
                cur.push(c);
                go(allowed, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(allowed, &mut Vec::new(), &mut out);
    out
}

struct Search<'a> {
    a: &'a BasedAlgebra,
    b: &'a BasedAlgebra,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    bij: Vec<usize>,
    inv: Vec<usize>,
    nodes: u64,
    limit: u64,
}

impl Search<'_> {
    fn pair_ok(&self, x: usize, y: usize) -> bool {
        let (p, q) = (self.a.product(x, y), self.b.product(self.bij[x], self.bij[y]));
        if !(p.complete && q.complete) {
            return true;
        }
        if p.sorted_coeffs() != q.sorted_coeffs() {
            return false;
        }
        p.terms.iter().all(|&(z, c)| self.bij[z] == usize::MAX || q.coeff(self.bij[z]) == c)
            && q.terms.iter().all(|&(w, c)| self.inv[w] == usize::MAX || p.coeff(self.inv[w]) == c)
    }

    /// Checks every complete triple among assigned elements that involves
    /// the newest assignment `x`.
    fn consistent(&self, depth: usize) -> bool {
        let x = self.order[depth];
        let assigned = &self.order[..=depth];
        for &y in assigned {
            if !self.pair_ok(x, y) || !self.pair_ok(y, x) {
                return false;
            }
        }
        let bx = self.bij[x];
        for &y1 in assigned {
            for &y2 in assigned {
                let (p, q) = (self.a.product(y1, y2), self.b.product(self.bij[y1], self.bij[y2]));
                if p.complete && q.complete && p.coeff(x) != q.coeff(bx) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        for i in 0..self.candidates[x].len() {
            let c = self.candidates[x][i];
            if self.inv[c] != usize::MAX {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return false;
            }
            self.bij[x] = c;
            self.inv[c] = x;
            if self.consistent(depth) && self.run(depth + 1) {
                return true;
            }
            self.bij[x] = usize::MAX;
            self.inv[c] = usize::MAX;
        }
        false
    }
}

/// Backtracking search for a basis bijection respecting the distinguished
/// set, the row and column classes and the grading, pruned by square
/// fingerprints and by checking complete triples as elements are placed.
/// Row class maps are tried in lexicographic order; column class maps must
/// carry distinguished elements onto distinguished elements.
pub fn iso_search(a: &BasedAlgebra, b: &BasedAlgebra, limits: SearchLimits) -> Result<IsoReport> {
    a.validate()?;
    b.validate()?;
    let n = a.len();
    if b.len() != n {
        return Ok(IsoReport::exhausted(a, b, format!("basis sizes differ: {n} and {}", b.len())));
    }
    let (ra, ca) = (a.row_names.len(), a.col_names.len());
    if b.row_names.len() != ra || b.col_names.len() != ca {
        return Ok(IsoReport::exhausted(a, b, "numbers of row or column classes differ".into()));
    }
    let b_blocks = block_counts(b, &(0..ra).collect::<Vec<_>>(), &(0..ca).collect::<Vec<_>>());
    let b_diag: BTreeSet<(usize, usize)> = b.distinguished.iter().map(|&d| (b.rows[d], b.cols[d])).collect();
    let a_fp: Vec<Option<Vec<u64>>> = (0..n).map(|x| fingerprint(a, x)).collect();
    let b_fp: Vec<Option<Vec<u64>>> = (0..n).map(|x| fingerprint(b, x)).collect();
    let mut nodes = 0;
    let mut tried = 0;
    for sr in injections(&vec![(0..ra).collect::<Vec<_>>(); ra]) {
        // columns allowed by the distinguished elements
        let allowed: Vec<Vec<usize>> = (0..ca)
            .map(|c| {
                (0..ca)
                    .filter(|&c2| {
                        a.distinguished.iter().filter(|&&d| a.cols[d] == c).all(|&d| b_diag.contains(&(sr[a.rows[d]], c2)))
                    })
                    .collect()
            })
            .collect();
        for sc in injections(&allowed) {
            if block_counts(a, &sr, &sc) != b_blocks {
                continue;
            }
            tried += 1;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&x| (a.grade[x], !a.is_distinguished(x), a.rows[x], a.cols[x], x));
            let candidates: Vec<Vec<usize>> = (0..n)
                .map(|x| {
                    (0..n)
                        .filter(|&y| {
                            b.rows[y] == sr[a.rows[x]]
                                && b.cols[y] == sc[a.cols[x]]
                                && b.grade[y] == a.grade[x]
                                && b.is_distinguished(y) == a.is_distinguished(x)
                                && match (&a_fp[x], &b_fp[y]) {
                                    (Some(f), Some(g)) => f == g,
                                    _ => true,
                                }
                        })
                        .collect()
                })
                .collect();
            let mut s = Search {
                a,
                b,
                order,
                candidates,
                bij: vec![usize::MAX; n],
                inv: vec![usize::MAX; n],
                nodes: 0,
                limit: limits.max_nodes.saturating_sub(nodes),
            };
            let found = s.run(0);
            nodes += s.nodes;
            if found {
                let mut report = iso_check(a, b, &s.bij)?;
                debug_assert_eq!(report.verdict, Verdict::Consistent);
                report.notes.push(format!("search visited {nodes} nodes over {tried} class maps"));
                return Ok(report);
            }
            if nodes >= limits.max_nodes {
                return Ok(IsoReport::exhausted(a, b, format!("node limit {} reached", limits.max_nodes)));
            }
        }
    }
    Ok(IsoReport::exhausted(a, b, format!("no bijection: {tried} class maps, {nodes} nodes")))
}
