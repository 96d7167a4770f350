//! The affine Hecke algebra over `ℤ[v, v⁻¹]` with standard basis `H_w`,
//! normalised by `(H_s + v⁻¹)(H_s − v) = 0`, its Kazhdan–Lusztig basis
//! and structure constants.

mod kl;
mod structure;

use std::collections::BTreeMap;

use crate::laurent::LaurentPoly;
use crate::weyl::{RootDatum, WeylElement};

pub use kl::KlTable;
pub use structure::{generator_product, structure_constants_direct, StructureTable};

/// Sparse element `Σ c_w H_w` of the Hecke algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElt {
    terms: BTreeMap<WeylElement, LaurentPoly>,
}

impl HeckeElt {
    pub fn zero() -> Self {
        HeckeElt::default()
    }

    /// The standard basis element `H_w`.
    pub fn basis(w: WeylElement) -> Self {
        Self::monomial(w, LaurentPoly::one())
    }

    pub fn monomial(w: WeylElement, c: LaurentPoly) -> Self {
        let mut out = HeckeElt::zero();
        out.add_term(w, &c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &WeylElement) -> LaurentPoly {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&WeylElement, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, w: WeylElement, c: &LaurentPoly) {
        self.add_term_scaled(w, c, 1, 0);
    }

    /// `self += k v^s c H_w`.
    pub fn add_term_scaled(&mut self, w: WeylElement, c: &LaurentPoly, k: i64, s: i32) {
        if c.is_zero() || k == 0 {
            return;
        }
        let entry = self.terms.entry(w).or_default();
        entry.add_scaled(c, k, s);
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add_assign_scaled(&mut self, other: &HeckeElt, c: &LaurentPoly) {
        for (w, p) in &other.terms {
            for &(e, k) in c.terms() {
                self.add_term_scaled(*w, p, k, e);
            }
        }
    }

    pub fn scale(&self, c: &LaurentPoly) -> HeckeElt {
        let mut out = HeckeElt::zero();
        out.add_assign_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &HeckeElt) -> HeckeElt {
        let mut out = self.clone();
        out.add_assign_scaled(other, &LaurentPoly::monomial(-1, 0));
        out
    }

    /// Right multiplication by `H_s` for the generator with index `i`.
    pub fn mul_generator(&self, d: &RootDatum, i: usize) -> HeckeElt {
        let s = d.generators()[i];
        let mut out = HeckeElt::zero();
        for (w, c) in &self.terms {
            let ws = d.mul(w, &s);
            if d.length(&ws) > d.length(w) {
                out.add_term(ws, c);
            } else {
                // H_w H_s = H_{ws} + (v − v⁻¹) H_w
                out.add_term(ws, c);
                out.add_term_scaled(*w, c, 1, 1);
                out.add_term_scaled(*w, c, -1, -1);
            }
        }
        out
    }

    /// Right multiplication by `H_x` for an arbitrary `x`.
    pub fn mul_basis(&self, d: &RootDatum, x: &WeylElement) -> HeckeElt {
        let (k, word) = d.reduced_word(x);
        let om = d.omega_element(k);
        let mut cur = HeckeElt::zero();
        for (w, c) in &self.terms {
            cur.add_term(d.mul(w, &om), c);
        }
        for i in word {
            cur = cur.mul_generator(d, i as usize);
        }
        cur
    }
}

/// Product in the Hecke algebra.
pub fn h_mul(d: &RootDatum, a: &HeckeElt, b: &HeckeElt) -> HeckeElt {
    let mut out = HeckeElt::zero();
    for (y, c) in &b.terms {
        let ay = a.mul_basis(d, y);
        out.add_assign_scaled(&ay, c);
    }
    out
}

/// The bar involution: `v ↦ v⁻¹`, `H_w ↦ (H_{w⁻¹})⁻¹`.
pub fn bar(d: &RootDatum, a: &HeckeElt) -> HeckeElt {
    let mut out = HeckeElt::zero();
    for (w, c) in &a.terms {
        let (k, word) = d.reduced_word(w);
        // bar(H_w) = H_ω · Π (H_s + v⁻¹ − v)
        let mut cur = HeckeElt::basis(d.omega_element(k));
        for i in word {
            let mut next = cur.mul_generator(d, i as usize);
            next.add_assign_scaled(&cur, &LaurentPoly::from_terms([(-1, 1), (1, -1)]));
            cur = next;
        }
        out.add_assign_scaled(&cur, &c.bar());
    }
    out
}

#[cfg(test)]
mod tests;
