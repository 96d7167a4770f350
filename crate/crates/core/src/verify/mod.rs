//! Based algebras and the comparison of `J_c` with convolution algebras:
//! checking a given basis bijection, searching for one, and the harness
//! that assembles both sides from a ball and a target description.

mod search;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cells::{CellAnalysis, CellKind, PROBE_DEPTH};
use crate::convalg::{ConvAlgebra, ConvTarget};
use crate::error::{Error, Result};

pub use search::{iso_search, SearchLimits};

/// One product of basis elements, truncated to the basis. `complete` is
/// false when terms may be missing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Product {
    pub terms: Vec<(usize, u64)>,
    pub complete: bool,
}

impl Product {
    pub fn coeff(&self, k: usize) -> u64 {
        self.terms.binary_search_by_key(&k, |t| t.0).map_or(0, |i| self.terms[i].1)
    }

    fn sorted_coeffs(&self) -> Vec<u64> {
        let mut c: Vec<u64> = self.terms.iter().map(|t| t.1).collect();
        c.sort_unstable();
        c
    }
}

/// A finite piece of a based ring: structure constants on a basis, the
/// basis elements summing to the unit, and the row and column classes that
/// play the part of matrix-unit indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasedAlgebra {
    pub name: String,
    pub labels: Vec<String>,
    /// Row-major `n × n` table of products.
    pub products: Vec<Product>,
    pub distinguished: Vec<usize>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    /// Size proxy used to block the basis during search.
    pub grade: Vec<u64>,
}

impl BasedAlgebra {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn product(&self, i: usize, j: usize) -> &Product {
        &self.products[i * self.len() + j]
    }

    pub fn is_distinguished(&self, i: usize) -> bool {
        self.distinguished.binary_search(&i).is_ok()
    }

    /// Shape checks: table size, sorted terms, indices in range.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let bad = |m: &str| Err(Error::Invariant(format!("{}: {m}", self.name)));
        if self.products.len() != n * n || self.rows.len() != n || self.cols.len() != n || self.grade.len() != n {
            return bad("table sizes do not match the basis");
        }
        if self.rows.iter().any(|&r| r >= self.row_names.len()) || self.cols.iter().any(|&c| c >= self.col_names.len()) {
            return bad("row or column class out of range");
        }
        if !self.distinguished.windows(2).all(|w| w[0] < w[1]) || self.distinguished.iter().any(|&d| d >= n) {
            return bad("distinguished set is not a sorted subset of the basis");
        }
        for p in &self.products {
            if !p.terms.windows(2).all(|w| w[0].0 < w[1].0) || p.terms.iter().any(|&(k, c)| k >= n || c == 0) {
                return bad("product terms are not sorted, nonzero and in range");
            }
        }
        Ok(())
    }

    /// Checks that the distinguished elements sum to a two-sided unit on
    /// every element whose products with them are complete. Returns the
    /// number of elements checked.
    pub fn unit_check(&self) -> Result<usize> {
        let mut checked = 0;
        for x in 0..self.len() {
            for left in [true, false] {
                let prods: Vec<&Product> =
                    self.distinguished.iter().map(|&d| if left { self.product(d, x) } else { self.product(x, d) }).collect();
                if !prods.iter().all(|p| p.complete) {
                    continue;
                }
                let mut sum: BTreeMap<usize, u64> = BTreeMap::new();
                for p in prods {
                    for &(k, c) in &p.terms {
                        *sum.entry(k).or_insert(0) += c;
                    }
                }
                if sum.len() != 1 || sum.get(&x) != Some(&1) {
                    return Err(Error::Invariant(format!("{}: unit fails on {}", self.name, self.labels[x])));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Compares `(xy)z` with `x(yz)` on every triple where all products
    /// involved are complete. Returns the number of triples compared and
    /// the failures.
    pub fn associativity(&self) -> (usize, Vec<[usize; 3]>) {
        let n = self.len();
        let expand = |p: &Product, z: usize, right: bool| -> Option<BTreeMap<usize, u64>> {
            let mut out = BTreeMap::new();
            for &(k, c) in &p.terms {
                let q = if right { self.product(k, z) } else { self.product(z, k) };
                if !q.complete {
                    return None;
                }
                for &(m, d) in &q.terms {
                    *out.entry(m).or_insert(0) += c * d;
                }
            }
            Some(out)
        };
        let results: Vec<(usize, Vec<[usize; 3]>)> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut count = 0;
                let mut bad = Vec::new();
                for y in 0..n {
                    let xy = self.product(x, y);
                    if !xy.complete {
                        continue;
                    }
                    for z in 0..n {
                        let yz = self.product(y, z);
                        if !yz.complete {
                            continue;
                        }
                        let (Some(l), Some(r)) = (expand(xy, z, true), expand(yz, x, false)) else { continue };
                        count += 1;
                        if l != r {
                            bad.push([x, y, z]);
                        }
                    }
                }
                (count, bad)
            })
            .collect();
        results.into_iter().fold((0, Vec::new()), |(c, mut b), (c2, b2)| {
            b.extend(b2);
            (c + c2, b)
        })
    }

    /// The same basis with reversed multiplication; rows and columns swap.
    pub fn opposite(&self) -> Self {
        let n = self.len();
        let products = (0..n * n).map(|k| self.products[(k % n) * n + k / n].clone()).collect();
        BasedAlgebra {
            name: format!("{}^op", self.name),
            labels: self.labels.clone(),
            products,
            distinguished: self.distinguished.clone(),
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            row_names: self.col_names.clone(),
            col_names: self.row_names.clone(),
            grade: self.grade.clone(),
        }
    }

    /// SHA-256 of the JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("serializable");
        hex::encode(Sha256::digest(&json))
    }

    /// `J_c` truncated to the members `w` of a stabilized two-sided cell
    /// with `ℓ(w) − a(c) ≤ bound`. Rows are right cells and columns left
    /// cells, so that `t_x t_y ≠ 0` needs the column of `x` to equal the row
    /// of `y`, as for matrix units.
    pub fn from_cell(an: &CellAnalysis, two_sided: usize, bound: u64) -> Result<Self> {
        let ball = an.ball();
        let cell = an.cells.cell(CellKind::TwoSided, two_sided);
        if !cell.stabilized {
            return Err(Error::Unstabilized(format!("two-sided cell {two_sided}")));
        }
        let a = an.afn.stable_cell_value(two_sided)?;
        let top = a + bound as usize;
        if ball.radius() < PROBE_DEPTH || top > ball.radius() - PROBE_DEPTH {
            return Err(Error::Unstabilized(format!(
                "truncation reaches length {top}, cell membership is only probed up to {}",
                ball.radius().saturating_sub(PROBE_DEPTH)
            )));
        }
        let members: Vec<usize> = cell.members.iter().copied().filter(|&w| ball.length(w) <= top).collect();
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let left = |w: usize| an.cells.cell_of(CellKind::Left, w);
        for &w in &members {
            if !left(w).stabilized || !left(ball.inverse(w)).stabilized {
                return Err(Error::Unstabilized(format!("left cell of {} or its inverse", ball.word(w))));
            }
        }
        let mut classes: Vec<usize> = members.iter().map(|&w| left(w).id).collect::<BTreeSet<_>>().into_iter().collect();
        classes.sort_unstable();
        let class_pos = |id: usize| classes.binary_search(&id).expect("left cell of a member");
        let names: Vec<String> = classes.iter().map(|&id| format!("L{id}")).collect();
        let rows: Vec<usize> = members.iter().map(|&w| class_pos(left(ball.inverse(w)).id)).collect();
        let cols: Vec<usize> = members.iter().map(|&w| class_pos(left(w).id)).collect();
        let mut products = Vec::with_capacity(members.len() * members.len());
        for &x in &members {
            for &y in &members {
                let p = match an.gamma.product(x, y) {
                    None => Product::default(),
                    Some(row) => {
                        let mut p = Product { terms: Vec::new(), complete: row.complete };
                        for &(w, c) in &row.terms {
                            match pos.get(&w) {
                                Some(&k) => p.terms.push((k, c)),
                                None => p.complete = false,
                            }
                        }
                        p.terms.sort_unstable();
                        p
                    }
                };
                products.push(p);
            }
        }
        let distinguished: Vec<usize> =
            an.gamma.distinguished_in(&an.cells, two_sided)?.into_iter().filter_map(|d| pos.get(&d).copied()).collect();
        let mut distinguished = distinguished;
        distinguished.sort_unstable();
        let alg = BasedAlgebra {
            name: format!("J[{}, cell {two_sided}, bound {bound}]", ball.datum().spec_string()),
            labels: members.iter().map(|&w| ball.word(w).to_string()).collect(),
            products,
            distinguished,
            rows,
            cols,
            row_names: names.clone(),
            col_names: names,
            grade: members.iter().map(|&w| (ball.length(w) - a) as u64).collect(),
        };
        alg.validate()?;
        Ok(alg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    RefutedOnBall,
    Exhausted,
}

/// A complete triple whose constants differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub triple: [String; 3],
    pub source: u64,
    pub target: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoReport {
    pub convention: String,
    pub verdict: Verdict,
    pub bijection: Vec<(String, String)>,
    pub row_map: Vec<(String, String)>,
    pub col_map: Vec<(String, String)>,
    pub checked_triples: u64,
    pub mismatches: Vec<Mismatch>,
    pub notes: Vec<String>,
    pub digests: BTreeMap<String, String>,
}

impl IsoReport {
    pub(crate) fn exhausted(a: &BasedAlgebra, b: &BasedAlgebra, note: String) -> Self {
        IsoReport {
            convention: "direct".into(),
            verdict: Verdict::Exhausted,
            bijection: Vec::new(),
            row_map: Vec::new(),
            col_map: Vec::new(),
            checked_triples: 0,
            mismatches: Vec::new(),
            notes: vec![note],
            digests: digests(a, b),
        }
    }
}

fn digests(a: &BasedAlgebra, b: &BasedAlgebra) -> BTreeMap<String, String> {
    BTreeMap::from([("source".to_string(), a.digest()), ("target".to_string(), b.digest())])
}

/// Class map induced by a bijection, if it is a well-defined injection.
fn class_map(from: &[usize], to: &[usize], bij: &[usize]) -> Option<BTreeMap<usize, usize>> {
    let mut map = BTreeMap::new();
    for (i, &j) in bij.iter().enumerate() {
        if *map.entry(from[i]).or_insert(to[j]) != to[j] {
            return None;
        }
    }
    let images: BTreeSet<usize> = map.values().copied().collect();
    (images.len() == map.len()).then_some(map)
}

/// Compares structure constants under a basis bijection on every triple
/// complete in both algebras. The bijection must send distinguished
/// elements to distinguished elements and induce bijections of row and of
/// column classes.
pub fn iso_check(a: &BasedAlgebra, b: &BasedAlgebra, bij: &[usize]) -> Result<IsoReport> {
    let n = a.len();
    if b.len() != n || bij.len() != n {
        return Err(Error::Config(format!("bijection between bases of size {n} and {} has {} entries", b.len(), bij.len())));
    }
    let mut inv = vec![usize::MAX; n];
    for (i, &j) in bij.iter().enumerate() {
        if j >= n || inv[j] != usize::MAX {
            return Err(Error::Config("map is not a bijection of bases".into()));
        }
        inv[j] = i;
    }
    if (0..n).any(|i| a.is_distinguished(i) != b.is_distinguished(bij[i])) {
        return Err(Error::Config("bijection does not preserve the distinguished set".into()));
    }
    let (Some(rows), Some(cols)) = (class_map(&a.rows, &b.rows, bij), class_map(&a.cols, &b.cols, bij)) else {
        return Err(Error::Config("bijection does not respect the row and column classes".into()));
    };
    let per_x: Vec<(u64, Vec<Mismatch>)> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut checked = 0;
            let mut bad = Vec::new();
            for y in 0..n {
                let (p, q) = (a.product(x, y), b.product(bij[x], bij[y]));
                if !(p.complete && q.complete) {
                    continue;
                }
                checked += n as u64;
                let mut ks: BTreeSet<usize> = p.terms.iter().map(|t| t.0).collect();
                ks.extend(q.terms.iter().map(|t| inv[t.0]));
                for z in ks {
                    let (s, t) = (p.coeff(z), q.coeff(bij[z]));
                    if s != t {
                        bad.push(Mismatch {
                            triple: [a.labels[x].clone(), a.labels[y].clone(), a.labels[z].clone()],
                            source: s,
                            target: t,
                        });
                    }
                }
            }
            (checked, bad)
        })
        .collect();
    let checked_triples = per_x.iter().map(|p| p.0).sum();
    let mismatches: Vec<Mismatch> = per_x.into_iter().flat_map(|p| p.1).collect();
    Ok(IsoReport {
        convention: "direct".into(),
        verdict: if mismatches.is_empty() { Verdict::Consistent } else { Verdict::RefutedOnBall },
        bijection: (0..n).map(|i| (a.labels[i].clone(), b.labels[bij[i]].clone())).collect(),
        row_map: rows.iter().map(|(&r, &s)| (a.row_names[r].clone(), b.row_names[s].clone())).collect(),
        col_map: cols.iter().map(|(&r, &s)| (a.col_names[r].clone(), b.col_names[s].clone())).collect(),
        checked_triples,
        mismatches,
        notes: Vec::new(),
        digests: digests(a, b),
    })
}

/// Which two-sided cell the harness compares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSelector {
    /// The stabilized cell with the largest a-value.
    Lowest,
    /// The cell of `e`.
    Identity,
    Index(usize),
}

impl FromStr for CellSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest" => Ok(CellSelector::Lowest),
            "identity" | "e" => Ok(CellSelector::Identity),
            _ => s.parse().map(CellSelector::Index).map_err(|_| Error::Config(format!("unknown cell selector {s:?}"))),
        }
    }
}

impl CellSelector {
    pub fn resolve(self, an: &CellAnalysis) -> Result<usize> {
        let id = match self {
            CellSelector::Identity => an.cells.identity_cell(),
            CellSelector::Index(i) if i < an.cells.cells(CellKind::TwoSided).len() => i,
            CellSelector::Index(i) => return Err(Error::Config(format!("no two-sided cell {i}"))),
            CellSelector::Lowest => an
                .cells
                .stabilized(CellKind::TwoSided)
                .into_iter()
                .filter_map(|c| an.afn.stable_cell_value(c.id).ok().map(|a| (a, c.id)))
                .max()
                .map(|(_, id)| id)
                .ok_or_else(|| Error::Unstabilized("no stabilized two-sided cell".into()))?,
        };
        if !an.cells.cell(CellKind::TwoSided, id).stabilized {
            return Err(Error::Unstabilized(format!("two-sided cell {id}")));
        }
        Ok(id)
    }
}

/// Compares `J_c` on the ball with the convolution algebra of a target,
/// first in the opposite convention (left cells against source points),
/// then in the direct one. The report names the convention that was used.
pub fn conjecture_harness(
    an: &CellAnalysis,
    selector: CellSelector,
    target: &ConvTarget,
    bound: u64,
    limits: SearchLimits,
) -> Result<IsoReport> {
    let cell = selector.resolve(an)?;
    let j = BasedAlgebra::from_cell(an, cell, bound)?;
    let k = ConvAlgebra::build(&target.group, &target.set, bound)?.to_based()?;
    let ball = an.ball();
    let mut first = None;
    for (convention, source) in [("opposite", j.opposite()), ("direct", j.clone())] {
        let mut report = iso_search(&source, &k, limits)?;
        report.convention = convention.into();
        report.notes.push(format!(
            "datum {}, radius {}, extended {}, cell {cell}, bound {bound}",
            ball.datum().spec_string(),
            ball.radius(),
            ball.extended()
        ));
        if report.verdict == Verdict::Consistent {
            return Ok(report);
        }
        first.get_or_insert(report);
    }
    Ok(first.expect("two conventions tried"))
}

#[cfg(test)]
mod tests;
