use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::HeckeElt;
use crate::cache::{KlCache, KlRecord};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::weyl::{Ball, WeylElement};

/// Kazhdan–Lusztig polynomials `p_{y,w}` for every `w` in a ball, stored
/// so that `C_w = Σ_y p_{y,w}(v⁻¹) H_y` with `p_{w,w} = 1` and
/// `p_{y,w} ∈ vℤ[v]` for `y ≠ w`.
#[derive(Debug)]
pub struct KlTable {
    ball: Arc<Ball>,
    cols: Vec<Vec<(usize, LaurentPoly)>>,
    mu_down: Vec<Vec<(usize, i64)>>,
    loaded: usize,
}

impl KlTable {
    pub fn build(ball: Arc<Ball>) -> Result<Self> {
        Self::build_inner(ball, None)
    }

    /// Like [`build`](Self::build), replaying columns found in `cache` and
    /// appending the ones that had to be computed.
    pub fn build_with_cache(ball: Arc<Ball>, cache: &mut KlCache) -> Result<Self> {
        Self::build_inner(ball, Some(cache))
    }

    fn build_inner(ball: Arc<Ball>, mut cache: Option<&mut KlCache>) -> Result<Self> {
        let n = ball.len();
        let mut cols: Vec<Vec<(usize, LaurentPoly)>> = vec![Vec::new(); n];
        let mut mu_down: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        let core = ball.core_ids();
        let mut loaded = 0;
        let mut fresh = Vec::new();

        let max_len = core.iter().map(|&w| ball.length(w)).max().unwrap_or(0);
        for l in 0..=max_len {
            let level: Vec<usize> = core.iter().copied().filter(|&w| ball.length(w) == l).collect();
            let mut todo = Vec::new();
            for &w in &level {
                match cache.as_deref().and_then(|c| replay(&ball, c, w)) {
                    Some(col) => {
                        cols[w] = col;
                        loaded += 1;
                    }
                    None => todo.push(w),
                }
            }
            let computed: Vec<(usize, Result<Vec<(usize, LaurentPoly)>>)> =
                todo.par_iter().map(|&w| (w, column(&ball, &cols, &mu_down, w))).collect();
            for (w, col) in computed {
                cols[w] = col?;
                fresh.push(w);
            }
            for &w in &level {
                mu_down[w] = mu_of(&cols[w], w);
            }
        }

        // Ω-translates: p_{ωy,ωw} = p_{y,w}
        for w in 0..n {
            let k = ball.omega_of(w);
            if k == 0 {
                continue;
            }
            let c = ball.core(w);
            let mut col: Vec<(usize, LaurentPoly)> =
                cols[c].iter().map(|(y, p)| (ball.omega_mul(k, *y), p.clone())).collect();
            col.sort_by_key(|t| t.0);
            let mut mu: Vec<(usize, i64)> = mu_down[c].iter().map(|&(z, m)| (ball.omega_mul(k, z), m)).collect();
            mu.sort_unstable();
            cols[w] = col;
            mu_down[w] = mu;
        }

        if let Some(cache) = cache.as_deref_mut() {
            let records: Vec<KlRecord> = fresh
                .iter()
                .map(|&w| KlRecord::new(ball.word(w), cols[w].iter().map(|(y, p)| (ball.word(*y).to_string(), p.clone()))))
                .collect();
            cache.append(&records)?;
        }
        Ok(KlTable { ball, cols, mu_down, loaded })
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    /// Number of columns replayed from a cache rather than computed.
    pub fn loaded_from_cache(&self) -> usize {
        self.loaded
    }

    /// `(y, p_{y,w})` for every `y` with nonzero polynomial, ascending ids.
    pub fn column(&self, w: usize) -> &[(usize, LaurentPoly)] {
        &self.cols[w]
    }

    pub fn p(&self, y: usize, w: usize) -> LaurentPoly {
        let col = &self.cols[w];
        col.binary_search_by_key(&y, |t| t.0).map(|i| col[i].1.clone()).unwrap_or_default()
    }

    /// `μ(z, w)`: the coefficient of `v` in `p_{z,w}`.
    pub fn mu(&self, z: usize, w: usize) -> i64 {
        if z == w {
            return 0;
        }
        self.p(z, w).coeff(1)
    }

    /// `(z, μ(z,w))` for all `z < w` with `μ ≠ 0`.
    pub fn mu_down(&self, w: usize) -> &[(usize, i64)] {
        &self.mu_down[w]
    }

    /// `C_w` in the standard basis.
    pub fn kl_element(&self, w: usize) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (y, p) in &self.cols[w] {
            out.add_term(self.ball.element(*y), &p.bar());
        }
        out
    }

    pub fn kl_element_of(&self, x: &WeylElement) -> Result<HeckeElt> {
        let id = self.ball.id_of(x).ok_or_else(|| Error::OutsideBall(self.ball.datum().word_string(x)))?;
        Ok(self.kl_element(id))
    }
}

fn replay(ball: &Ball, cache: &KlCache, w: usize) -> Option<Vec<(usize, LaurentPoly)>> {
    let rec = cache.get(ball.word(w))?;
    let mut col = Vec::with_capacity(rec.entries.len());
    for (y, p) in &rec.entries {
        col.push((ball.id_of_word(y).ok()?, p.clone()));
    }
    col.sort_by_key(|t| t.0);
    Some(col)
}

fn mu_of(col: &[(usize, LaurentPoly)], w: usize) -> Vec<(usize, i64)> {
    col.iter().filter(|(y, p)| *y != w && p.coeff(1) != 0).map(|(y, p)| (*y, p.coeff(1))).collect()
}

// p_{y,w} = p_{sy,u} + (sy > y ? v : v⁻¹) p_{y,u} − Σ_{z : sz < z} μ(z,u) p_{y,z}
// with s the smallest left descent of w and u = sw.
fn column(
    ball: &Ball,
    cols: &[Vec<(usize, LaurentPoly)>],
    mu_down: &[Vec<(usize, i64)>],
    w: usize,
) -> Result<Vec<(usize, LaurentPoly)>> {
    if ball.length(w) == 0 {
        return Ok(vec![(w, LaurentPoly::one())]);
    }
    let i = (0..ball.num_generators()).find(|&i| ball.is_left_descent(i, w)).expect("descent exists");
    let u = ball.left_mul(i, w).expect("descent stays in ball");
    let mut acc: BTreeMap<usize, LaurentPoly> = BTreeMap::new();
    for (y, p) in &cols[u] {
        let sy = ball.left_mul(i, *y).expect("Bruhat interval lies in ball");
        acc.entry(sy).or_default().add_scaled(p, 1, 0);
        let up = ball.length(sy) > ball.length(*y);
        acc.entry(*y).or_default().add_scaled(p, 1, if up { 1 } else { -1 });
    }
    for &(z, m) in &mu_down[u] {
        if !ball.is_left_descent(i, z) {
            continue;
        }
        for (y, p) in &cols[z] {
            acc.entry(*y).or_default().add_scaled(p, -m, 0);
        }
    }
    let col: Vec<(usize, LaurentPoly)> = acc.into_iter().filter(|(_, p)| !p.is_zero()).collect();
    for (y, p) in &col {
        let ok = if *y == w {
            *p == LaurentPoly::one()
        } else {
            p.min_degree().is_some_and(|d| d >= 1) && p.all_nonnegative() && ball.length(*y) < ball.length(w)
        };
        if !ok {
            return Err(Error::Invariant(format!("p({}, {}) = {p}", ball.word(*y), ball.word(w))));
        }
    }
    Ok(col)
}
