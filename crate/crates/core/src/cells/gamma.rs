use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{AFunction, CellDecomposition, CellKind};
use crate::error::{Error, Result};
use crate::hecke::StructureTable;
use crate::weyl::Ball;

/// One product `t_x t_y = Σ_w c_w t_w` with `c_w = γ_{x,y,w⁻¹}`. It is
/// complete when `(x, y)` is a complete pair and every `w` with
/// `h_{x,y,w} ≠ 0` has a stabilized a-value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JRow {
    pub terms: Vec<(usize, u64)>,
    pub complete: bool,
}

/// γ-constants on a ball, stored as the products of basis elements of `J`.
/// `γ_{x,y,z}` is the constant term of `v^{a(w)} h_{x,y,w}` at `w = z⁻¹`,
/// with `a` the stabilized value on the two-sided cell of `w`.
#[derive(Debug)]
pub struct GammaTable {
    ball: Arc<Ball>,
    rows: HashMap<(usize, usize), JRow>,
    distinguished: BTreeSet<usize>,
}

impl GammaTable {
    pub fn build(st: &StructureTable, cells: &CellDecomposition, afn: &AFunction) -> Result<Self> {
        let ball = st.kl().ball().clone();
        let mut rows = HashMap::new();
        for (x, y) in st.complete_pairs() {
            let mut row = JRow { terms: Vec::new(), complete: true };
            for (w, h) in st.product(x, y).expect("complete") {
                let Ok(a) = afn.stable_cell_value(cells.label(CellKind::TwoSided, *w)) else {
                    row.complete = false;
                    continue;
                };
                let a = a as i32;
                if h.min_degree().is_some_and(|d| d < -a) {
                    return Err(Error::Invariant(format!(
                        "deg h({}, {}, {}) exceeds a = {a}",
                        ball.word(x),
                        ball.word(y),
                        ball.word(*w)
                    )));
                }
                let c = h.coeff(-a);
                if c < 0 {
                    return Err(Error::Invariant("negative γ".into()));
                }
                if c > 0 {
                    row.terms.push((*w, c as u64));
                }
            }
            rows.insert((x, y), row);
        }
        // 𝒟 = {d : Δ(d) = a(d)}, Δ(d) being the lowest power of v in p_{e,d}
        let kl = st.kl();
        let mut distinguished = BTreeSet::new();
        for d in 0..ball.len() {
            let Ok(a) = afn.stable_cell_value(cells.label(CellKind::TwoSided, d)) else { continue };
            let delta = if d == 0 { Some(0) } else { kl.p(0, d).min_degree() };
            if delta == Some(a as i32) {
                if ball.inverse(d) != d {
                    return Err(Error::Invariant(format!("distinguished element {} is not an involution", ball.word(d))));
                }
                distinguished.insert(d);
            }
        }
        for &d in &distinguished {
            if let Some(row) = rows.get(&(d, d)) {
                if row.complete && !row.terms.contains(&(d, 1)) {
                    return Err(Error::Invariant(format!("γ(d, d, d) ≠ 1 for d = {}", ball.word(d))));
                }
            }
        }
        Ok(GammaTable { ball, rows, distinguished })
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    /// `t_x t_y`, or `None` when `(x, y)` is not a complete pair.
    pub fn product(&self, x: usize, y: usize) -> Option<&JRow> {
        self.rows.get(&(x, y))
    }

    /// `γ_{x,y,z}`; `None` when the product `t_x t_y` is not complete.
    pub fn gamma(&self, x: usize, y: usize, z: usize) -> Option<u64> {
        let row = self.rows.get(&(x, y))?;
        let w = self.ball.inverse(z);
        let c = row.terms.iter().find(|t| t.0 == w).map_or(0, |t| t.1);
        (row.complete || c > 0).then_some(c)
    }

    /// All recorded nonzero `(x, y, z, γ_{x,y,z})`, sorted.
    pub fn triples(&self) -> Vec<(usize, usize, usize, u64)> {
        let mut out: Vec<(usize, usize, usize, u64)> = self
            .rows
            .iter()
            .flat_map(|(&(x, y), row)| row.terms.iter().map(move |&(w, c)| (x, y, self.ball.inverse(w), c)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Distinguished involutions in the ball: the `d` whose KL polynomial
    /// `p_{e,d}` has lowest degree exactly `a(d)`, for `d` in cells with a
    /// stabilized a-value.
    pub fn distinguished(&self) -> &BTreeSet<usize> {
        &self.distinguished
    }

    /// Involutions `d` with `γ_{x⁻¹,x,d} ≠ 0` for some `x` in the ball. This
    /// set contains `𝒟` but is in general larger.
    pub fn gamma_involutions(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (&(xi, x), row) in &self.rows {
            if self.ball.inverse(x) != xi {
                continue;
            }
            for &(d, _) in &row.terms {
                if self.ball.inverse(d) == d {
                    out.insert(d);
                }
            }
        }
        out
    }

    /// `𝒟 ∩ c` for a two-sided cell, validated against the one-per-left-cell
    /// property on its stabilized left cells.
    pub fn distinguished_in(&self, cells: &CellDecomposition, two_sided: usize) -> Result<Vec<usize>> {
        let found: Vec<usize> = self
            .distinguished
            .iter()
            .copied()
            .filter(|&d| cells.label(CellKind::TwoSided, d) == two_sided)
            .collect();
        for lc in cells.left_cells_in(two_sided) {
            if !lc.stabilized {
                continue;
            }
            let here: Vec<usize> = found.iter().copied().filter(|&d| cells.label(CellKind::Left, d) == lc.id).collect();
            if here.is_empty() {
                return Err(Error::Unstabilized(format!(
                    "no distinguished involution of left cell {} (from {}) inside the ball",
                    lc.id,
                    self.ball.word(lc.members[0])
                )));
            }
            if here.len() > 1 {
                let words: Vec<&str> = here.iter().map(|&d| self.ball.word(d)).collect();
                return Err(Error::Invariant(format!(
                    "left cell {} (from {}) has {} distinguished involutions {:?}",
                    lc.id,
                    self.ball.word(lc.members[0]),
                    here.len(),
                    words
                )));
            }
        }
        Ok(found)
    }
}
