//! The asymptotic ring `J` on a ball: basis `t_x`, products read from the
//! γ-table, the truncated unit, and the cell-level checks.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cells::{CellAnalysis, CellKind, GammaTable};
use crate::error::{Error, Result};

/// Integer combination of basis elements `t_x` of `J`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct JElt {
    terms: BTreeMap<usize, i64>,
}

impl JElt {
    pub fn zero() -> Self {
        JElt::default()
    }

    pub fn basis(x: usize) -> Self {
        JElt { terms: BTreeMap::from([(x, 1)]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, x: usize) -> i64 {
        self.terms.get(&x).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.terms.iter().map(|(&x, &c)| (x, c))
    }

    pub fn add_term(&mut self, x: usize, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(x).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&x);
        }
    }

    pub fn add(&self, other: &JElt) -> JElt {
        let mut out = self.clone();
        for (x, c) in other.iter() {
            out.add_term(x, c);
        }
        out
    }

    pub fn sub(&self, other: &JElt) -> JElt {
        let mut out = self.clone();
        for (x, c) in other.iter() {
            out.add_term(x, -c);
        }
        out
    }
}

impl FromIterator<(usize, i64)> for JElt {
    fn from_iter<I: IntoIterator<Item = (usize, i64)>>(iter: I) -> Self {
        let mut out = JElt::zero();
        for (x, c) in iter {
            out.add_term(x, c);
        }
        out
    }
}

/// Product in `J`. The flag is false when some basis product involved is
/// not certified complete on the ball; the coefficients that are present
/// are still exact.
pub fn j_mul(gamma: &GammaTable, a: &JElt, b: &JElt) -> (JElt, bool) {
    let mut out = JElt::zero();
    let mut complete = true;
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            match gamma.product(x, y) {
                Some(row) => {
                    complete &= row.complete;
                    for &(w, c) in &row.terms {
                        out.add_term(w, cx * cy * c as i64);
                    }
                }
                None => complete = false,
            }
        }
    }
    (out, complete)
}

/// `Σ t_d` over the distinguished involutions found in the ball.
pub fn truncated_unit(an: &CellAnalysis) -> JElt {
    an.gamma.distinguished().iter().map(|&d| (d, 1)).collect()
}

/// The distinguished part of one two-sided cell, the unit of `J_c`.
pub fn cell_unit(an: &CellAnalysis, two_sided: usize) -> Result<JElt> {
    Ok(an.gamma.distinguished_in(&an.cells, two_sided)?.into_iter().map(|d| (d, 1)).collect())
}

/// Checks `1·t_x = t_x = t_x·1` for every `x` whose products with the
/// truncated unit are complete. Returns the number of elements checked.
pub fn unit_check(an: &CellAnalysis) -> Result<usize> {
    let unit = truncated_unit(an);
    let ball = an.ball();
    let mut checked = 0;
    for x in 0..ball.len() {
        let tx = JElt::basis(x);
        let (l, lc) = j_mul(&an.gamma, &unit, &tx);
        let (r, rc) = j_mul(&an.gamma, &tx, &unit);
        if !(lc && rc) {
            continue;
        }
        if l != tx || r != tx {
            return Err(Error::Invariant(format!("truncated unit fails on t_{}", ball.word(x))));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Asserts `t_x t_y = 0` for complete products with `x`, `y` in different
/// two-sided cells. Returns the number of pairs checked.
pub fn cell_orthogonality_check(an: &CellAnalysis) -> Result<usize> {
    let ball = an.ball();
    let mut checked = 0;
    for (x, y) in an.structure.complete_pairs() {
        if an.cells.label(CellKind::TwoSided, x) == an.cells.label(CellKind::TwoSided, y) {
            continue;
        }
        let Some(row) = an.gamma.product(x, y) else { continue };
        if let Some(&(w, c)) = row.terms.first() {
            return Err(Error::Invariant(format!(
                "γ({}, {}, {}) = {c} across two-sided cells",
                ball.word(x),
                ball.word(y),
                ball.word(ball.inverse(w))
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Which triples an associativity check visits.
#[derive(Clone, Copy, Debug)]
pub enum TripleSelection {
    All,
    Sample { count: usize, seed: u64 },
}

/// `(t_x t_y) t_z = t_x (t_y t_z)` on every selected triple for which both
/// sides are complete. Returns the number of triples compared.
pub fn associativity_check(an: &CellAnalysis, selection: TripleSelection) -> Result<usize> {
    let ball = an.ball();
    let n = ball.len();
    let total = n * n * n;
    let triples: Vec<usize> = match selection {
        TripleSelection::All => (0..total).collect(),
        TripleSelection::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = sample(&mut rng, total, count.min(total)).into_vec();
            v.sort_unstable();
            v
        }
    };
    let results: Vec<Option<(usize, usize, usize)>> = triples
        .par_iter()
        .map(|&t| {
            let (x, y, z) = (t / (n * n), (t / n) % n, t % n);
            let (xy, c1) = j_mul(&an.gamma, &JElt::basis(x), &JElt::basis(y));
            let (yz, c2) = j_mul(&an.gamma, &JElt::basis(y), &JElt::basis(z));
            if !(c1 && c2) {
                return None;
            }
            let (l, c3) = j_mul(&an.gamma, &xy, &JElt::basis(z));
            let (r, c4) = j_mul(&an.gamma, &JElt::basis(x), &yz);
            if !(c3 && c4) {
                return None;
            }
            Some(if l == r { (usize::MAX, 0, 0) } else { (x, y, z) })
        })
        .collect();
    let mut checked = 0;
    for r in results.into_iter().flatten() {
        if r.0 != usize::MAX {
            return Err(Error::Invariant(format!(
                "associativity fails on t_{} t_{} t_{}",
                ball.word(r.0),
                ball.word(r.1),
                ball.word(r.2)
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

/// An element of `Γ1 ∩ Γ2⁻¹` together with the product that exhibits it:
/// `t_w t_y t_{w'} ≠ 0` with `w ∈ Γ1`, `w' ∈ Γ2⁻¹`, and the witness is `y⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub element: usize,
    pub w: usize,
    pub y: usize,
    pub w_prime: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum WitnessOutcome {
    Found(Witness),
    /// Nothing in the ball works. This says nothing about the whole group.
    Inconclusive { searched: usize },
}

/// Searches the ball for `y` with `t_w t_y t_{w'} ≠ 0`, `w ∈ Γ1`,
/// `w'⁻¹ ∈ Γ2`, and checks that `y⁻¹` lies in `Γ1 ∩ Γ2⁻¹`.
pub fn lemma_witness(an: &CellAnalysis, gamma1: usize, gamma2: usize) -> Result<WitnessOutcome> {
    let cells = &an.cells;
    let ball = an.ball();
    let (c1, c2) = (cells.cell(CellKind::Left, gamma1), cells.cell(CellKind::Left, gamma2));
    let t1 = cells.label(CellKind::TwoSided, c1.members[0]);
    if t1 != cells.label(CellKind::TwoSided, c2.members[0]) {
        return Err(Error::Config(format!("left cells {gamma1} and {gamma2} lie in different two-sided cells")));
    }
    if !(cells.cell(CellKind::TwoSided, t1).stabilized && c1.stabilized && c2.stabilized) {
        return Err(Error::Unstabilized(format!("left cells {gamma1}, {gamma2}")));
    }
    let mut searched = 0;
    for &w in &c1.members {
        for &v in &c2.members {
            let w_prime = ball.inverse(v);
            for y in 0..ball.len() {
                searched += 1;
                let (wy, _) = j_mul(&an.gamma, &JElt::basis(w), &JElt::basis(y));
                if wy.is_zero() {
                    continue;
                }
                // coefficients are nonnegative, so a nonzero partial product is final
                let (full, _) = j_mul(&an.gamma, &wy, &JElt::basis(w_prime));
                if full.is_zero() {
                    continue;
                }
                let element = ball.inverse(y);
                if cells.label(CellKind::Left, element) != gamma1 || cells.label(CellKind::Left, y) != gamma2 {
                    return Err(Error::Invariant(format!(
                        "t_{} t_{} t_{} ≠ 0 but {} is not in Γ1 ∩ Γ2⁻¹",
                        ball.word(w),
                        ball.word(y),
                        ball.word(w_prime),
                        ball.word(element)
                    )));
                }
                return Ok(WitnessOutcome::Found(Witness { element, w, y, w_prime }));
            }
        }
    }
    Ok(WitnessOutcome::Inconclusive { searched })
}

/// Multiplication table of `J_c`: all recorded products of basis elements
/// of the cell, as `(x, y, terms, complete)`.
pub fn cell_table(an: &CellAnalysis, two_sided: usize) -> Result<Vec<(usize, usize, Vec<(usize, u64)>, bool)>> {
    let cell = an.cells.cell(CellKind::TwoSided, two_sided);
    if !cell.stabilized {
        return Err(Error::Unstabilized(format!("two-sided cell {two_sided}")));
    }
    let mut out = Vec::new();
    for &x in &cell.members {
        for &y in &cell.members {
            if let Some(row) = an.gamma.product(x, y) {
                out.push((x, y, row.terms.clone(), row.complete));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::hecke::KlTable;
    use crate::weyl::{Ball, RootDatum};

    fn analysis(spec: &str, radius: usize, extended: bool) -> CellAnalysis {
        let d = Arc::new(RootDatum::from_spec(spec).unwrap());
        let ball = Arc::new(Ball::new(d, radius, extended).unwrap());
        CellAnalysis::build(Arc::new(KlTable::build(ball).unwrap())).unwrap()
    }

    fn t(an: &CellAnalysis, w: &str) -> JElt {
        JElt::basis(an.ball().id_of_word(w).unwrap())
    }

    #[test]
    fn a1_products() {
        let an = analysis("A1:sc", 10, false);
        let g = &an.gamma;
        assert_eq!(j_mul(g, &t(&an, "s0"), &t(&an, "s0")), (t(&an, "s0"), true));
        assert_eq!(j_mul(g, &t(&an, "s0"), &t(&an, "s1")), (JElt::zero(), true));
        assert_eq!(j_mul(g, &t(&an, "e"), &t(&an, "s0")), (JElt::zero(), true));
        let (p, complete) = j_mul(g, &t(&an, "s0s1"), &t(&an, "s1s0"));
        assert!(complete);
        assert_eq!(p, t(&an, "s0").add(&t(&an, "s0s1s0")));
    }

    #[test]
    fn a1_unit() {
        let an = analysis("A1:sc", 10, false);
        let unit = truncated_unit(&an);
        assert_eq!(unit, t(&an, "e").add(&t(&an, "s0")).add(&t(&an, "s1")));
        assert!(unit_check(&an).unwrap() > 10);
        let e_cell = an.cells.identity_cell();
        assert_eq!(cell_unit(&an, e_cell).unwrap(), t(&an, "e"));
        assert_eq!(j_mul(&an.gamma, &t(&an, "e"), &t(&an, "e")), (t(&an, "e"), true));
    }

    #[test]
    fn associativity_and_orthogonality() {
        let an = analysis("A1:sc", 10, false);
        assert!(associativity_check(&an, TripleSelection::All).unwrap() > 100);
        assert!(cell_orthogonality_check(&an).unwrap() > 0);
        let an = analysis("A2:sc", 8, false);
        assert!(cell_orthogonality_check(&an).unwrap() > 100);
        assert!(associativity_check(&an, TripleSelection::Sample { count: 4000, seed: 7 }).unwrap() > 0);
    }

    #[test]
    fn gamma_values_are_small_in_a1() {
        let an = analysis("A1:sc", 10, true);
        assert!(an.gamma.triples().iter().all(|t| t.3 == 1));
    }

    #[test]
    fn witnesses() {
        let an = analysis("A1:sc", 12, false);
        let b = an.ball();
        let e_left = an.cells.label(CellKind::Left, 0);
        match lemma_witness(&an, e_left, e_left).unwrap() {
            WitnessOutcome::Found(w) => assert_eq!(w.element, 0),
            other => panic!("{other:?}"),
        }
        let l0 = an.cells.label(CellKind::Left, b.id_of_word("s0").unwrap());
        let l1 = an.cells.label(CellKind::Left, b.id_of_word("s1").unwrap());
        for (g1, g2) in [(l0, l0), (l0, l1), (l1, l0), (l1, l1)] {
            let WitnessOutcome::Found(w) = lemma_witness(&an, g1, g2).unwrap() else { panic!() };
            assert_eq!(an.cells.label(CellKind::Left, w.element), g1);
            assert_eq!(an.cells.label(CellKind::Left, b.inverse(w.element)), g2);
        }
        let WitnessOutcome::Found(w) = lemma_witness(&an, l0, l1).unwrap() else { panic!() };
        assert_eq!(b.word(w.element), "s1s0");
        let WitnessOutcome::Found(w) = lemma_witness(&an, l0, l0).unwrap() else { panic!() };
        assert_eq!(b.word(w.element), "s0");
        assert!(an.gamma.distinguished().contains(&w.element));
        assert!(lemma_witness(&an, e_left, l0).is_err());
    }

    #[test]
    fn witnesses_in_a2_lowest_cell() {
        // at radius 10 some pairs need products that leave the ball
        let an = analysis("A2:sc", 10, false);
        let lowest = an.cells.label(CellKind::TwoSided, an.ball().id_of_word("s1s2s1").unwrap());
        let left: Vec<usize> = an.cells.left_cells_in(lowest).iter().filter(|c| c.stabilized).map(|c| c.id).collect();
        let outcomes: Vec<WitnessOutcome> =
            left.iter().flat_map(|&g1| left.iter().map(move |&g2| (g1, g2))).map(|(g1, g2)| lemma_witness(&an, g1, g2).unwrap()).collect();
        assert!(outcomes.iter().any(|o| matches!(o, WitnessOutcome::Inconclusive { .. })));

        let an = analysis("A2:sc", 12, false);
        let lowest = an.cells.label(CellKind::TwoSided, an.ball().id_of_word("s1s2s1").unwrap());
        let left: Vec<usize> = an.cells.left_cells_in(lowest).iter().filter(|c| c.stabilized).map(|c| c.id).collect();
        assert_eq!(left.len(), 6);
        for &g1 in &left {
            for &g2 in &left {
                let WitnessOutcome::Found(w) = lemma_witness(&an, g1, g2).unwrap() else { panic!("{g1} {g2}") };
                assert_eq!(an.cells.label(CellKind::Left, w.element), g1);
                assert_eq!(an.cells.label(CellKind::Left, an.ball().inverse(w.element)), g2);
            }
        }
    }

    #[test]
    fn cell_tables_have_nonnegative_entries() {
        let an = analysis("A2:sc", 8, false);
        for c in an.cells.stabilized(CellKind::TwoSided) {
            let table = cell_table(&an, c.id).unwrap();
            assert!(!table.is_empty());
            for (x, y, terms, _) in table {
                for (w, _) in terms {
                    assert_eq!(an.cells.label(CellKind::TwoSided, w), c.id, "{x} {y}");
                }
            }
        }
    }
}
