use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{h_mul, HeckeElt, KlTable};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;

type Sparse = BTreeMap<usize, LaurentPoly>;

/// Structure constants `h_{x,y,z}` of the KL basis, `C_x C_y = Σ h_{x,y,z} C_z`,
/// for every pair with `ℓ(x) + ℓ(y) ≤ bound`. Such pairs are complete: all
/// `z` with `h_{x,y,z} ≠ 0` have `ℓ(z) ≤ ℓ(x) + ℓ(y)` and so lie in the ball.
#[derive(Debug)]
pub struct StructureTable {
    kl: Arc<KlTable>,
    bound: usize,
    // rows[y][x]
    rows: Vec<Vec<Option<Vec<(usize, LaurentPoly)>>>>,
}

impl StructureTable {
    /// Builds every complete pair up to `bound` (clamped to the ball
    /// radius), in parallel over `y`.
    pub fn build(kl: Arc<KlTable>, bound: usize) -> Result<Self> {
        let ball = kl.ball().clone();
        let bound = bound.min(ball.radius());
        let n = ball.len();
        let rows: Vec<Result<Vec<Option<Vec<(usize, LaurentPoly)>>>>> =
            (0..n).into_par_iter().map(|y| products_for(&kl, y, bound)).collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(StructureTable { kl, bound, rows })
    }

    pub fn kl(&self) -> &Arc<KlTable> {
        &self.kl
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn is_complete(&self, x: usize, y: usize) -> bool {
        let b = self.kl.ball();
        b.length(x) + b.length(y) <= self.bound
    }

    /// The nonzero `(z, h_{x,y,z})`, or `None` for an incomplete pair.
    pub fn product(&self, x: usize, y: usize) -> Option<&[(usize, LaurentPoly)]> {
        self.rows[y][x].as_deref()
    }

    pub fn h(&self, x: usize, y: usize, z: usize) -> Option<LaurentPoly> {
        let row = self.product(x, y)?;
        Some(row.binary_search_by_key(&z, |t| t.0).map(|i| row[i].1.clone()).unwrap_or_default())
    }

    /// All complete pairs, ordered by `(x, y)`.
    pub fn complete_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.rows.len();
        (0..n).flat_map(|x| (0..n).filter(move |&y| self.rows[y][x].is_some()).map(move |y| (x, y))).collect()
    }
}

/// `C_s · C_y` for the generator with index `i`, restricted to the ball;
/// the flag is false when a term fell outside.
pub fn generator_product(kl: &KlTable, i: usize, y: usize) -> (Vec<(usize, LaurentPoly)>, bool) {
    let mut v = Sparse::new();
    v.insert(y, LaurentPoly::one());
    let (out, complete) = apply_generator(kl, i, &v);
    (out.into_iter().collect(), complete)
}

// C_s C_z = (v + v⁻¹) C_z if sz < z, else C_{sz} + Σ_{z' < z, sz' < z'} μ(z', z) C_{z'}
fn apply_generator(kl: &KlTable, i: usize, v: &Sparse) -> (Sparse, bool) {
    let ball = kl.ball();
    let q2 = LaurentPoly::quantum_two();
    let mut out = Sparse::new();
    let mut complete = true;
    for (&z, c) in v {
        if ball.is_left_descent(i, z) {
            *out.entry(z).or_default() += &(&q2 * c);
            continue;
        }
        match ball.left_mul(i, z) {
            Some(sz) => out.entry(sz).or_default().add_scaled(c, 1, 0),
            None => complete = false,
        }
        for &(zp, m) in kl.mu_down(z) {
            if ball.is_left_descent(i, zp) {
                out.entry(zp).or_default().add_scaled(c, m, 0);
            }
        }
    }
    out.retain(|_, p| !p.is_zero());
    (out, complete)
}

// h(x, y) for all x with ℓ(x) ≤ bound − ℓ(y), by induction on ℓ(x):
// C_x = C_s C_u − Σ_{z < u, sz < z} μ(z,u) C_z with s the smallest left
// descent of x and u = sx, and C_{ωx} = H_ω C_x.
fn products_for(kl: &KlTable, y: usize, bound: usize) -> Result<Vec<Option<Vec<(usize, LaurentPoly)>>>> {
    let ball = kl.ball();
    let n = ball.len();
    let mut memo: Vec<Option<Sparse>> = vec![None; n];
    if ball.length(y) > bound {
        return Ok(vec![None; n]);
    }
    let max_x = bound - ball.length(y);
    let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); max_x + 1];
    for x in 0..n {
        if ball.length(x) <= max_x {
            by_len[ball.length(x)].push(x);
        }
    }
    for level in &by_len {
        let (core, rest): (Vec<usize>, Vec<usize>) = level.iter().partition(|&&x| ball.omega_of(x) == 0);
        for x in core.into_iter().chain(rest) {
            let k = ball.omega_of(x);
            let h = if k != 0 {
                let base = memo[ball.core(x)].as_ref().expect("core computed first");
                base.iter().map(|(z, p)| (ball.omega_mul(k, *z), p.clone())).collect()
            } else if ball.length(x) == 0 {
                Sparse::from([(y, LaurentPoly::one())])
            } else {
                let i = (0..ball.num_generators()).find(|&i| ball.is_left_descent(i, x)).expect("descent");
                let u = ball.left_mul(i, x).expect("descent in ball");
                let (mut h, complete) = apply_generator(kl, i, memo[u].as_ref().expect("shorter computed"));
                if !complete {
                    return Err(Error::Invariant(format!("product C_{} C_{} left the ball", ball.word(x), ball.word(y))));
                }
                for &(z, m) in kl.mu_down(u) {
                    if !ball.is_left_descent(i, z) {
                        continue;
                    }
                    for (w, p) in memo[z].as_ref().expect("shorter computed") {
                        h.entry(*w).or_default().add_scaled(p, -m, 0);
                    }
                }
                h.retain(|_, p| !p.is_zero());
                h
            };
            for (z, p) in &h {
                if !p.all_nonnegative() || !p.is_bar_invariant() {
                    return Err(Error::Invariant(format!(
                        "h({}, {}, {}) = {p}",
                        ball.word(x),
                        ball.word(y),
                        ball.word(*z)
                    )));
                }
            }
            memo[x] = Some(h);
        }
    }
    Ok(memo.into_iter().map(|m| m.map(|s| s.into_iter().collect())).collect())
}

/// `h_{x,y,·}` computed the slow way: expand `C_x C_y` in the standard basis
/// and peel off KL basis elements from the top length down. The flag is
/// false when the support escapes the ball (the result is then partial).
pub fn structure_constants_direct(kl: &KlTable, x: usize, y: usize) -> Result<(Vec<(usize, LaurentPoly)>, bool)> {
    let ball = kl.ball();
    let d = ball.datum();
    let mut rest = h_mul(d, &kl.kl_element(x), &kl.kl_element(y));
    let mut out = Sparse::new();
    while !rest.is_zero() {
        let (top, c) = rest
            .iter()
            .max_by_key(|(w, _)| (d.length(w), **w))
            .map(|(w, c)| (*w, c.clone()))
            .expect("nonzero");
        if !c.is_bar_invariant() {
            return Err(Error::Invariant(format!("leading coefficient {c} at {} not bar-invariant", d.word_string(&top))));
        }
        let Some(z) = ball.id_of(&top) else {
            return Ok((out.into_iter().collect(), false));
        };
        let cz: HeckeElt = kl.kl_element(z);
        rest.add_assign_scaled(&cz, &c.scale(-1));
        out.insert(z, c);
    }
    Ok((out.into_iter().collect(), true))
}
