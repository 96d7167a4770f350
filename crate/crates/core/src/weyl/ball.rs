use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::datum::{RootDatum, Weight, WeylElement};
use crate::error::{Error, Result};

/// All elements of length at most `radius`, with dense ids assigned in BFS
/// order (by length, then discovery). Every downstream table is indexed by
/// these ids. Immutable after construction.
#[derive(Debug)]
pub struct Ball {
    datum: Arc<RootDatum>,
    radius: usize,
    extended: bool,
    elements: Vec<WeylElement>,
    index: HashMap<WeylElement, usize>,
    lengths: Vec<usize>,
    inverse: Vec<usize>,
    left: Vec<Vec<Option<usize>>>,
    right: Vec<Vec<Option<usize>>>,
    omega_codes: Vec<i64>,
    omega_left: Vec<Vec<usize>>,
    omega_of: Vec<usize>,
    core: Vec<usize>,
    words: Vec<String>,
}

/// JSON export row for a ball element.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BallRecord {
    pub id: usize,
    pub word: String,
    pub finite_part_word: Vec<u8>,
    pub translation: Vec<i64>,
    pub length: usize,
}

impl Ball {
    /// Enumerates `{w : ℓ(w) ≤ radius}` by BFS from the length-zero elements
    /// via right multiplication by `S`. Without `extended` only the affine
    /// Weyl group `W` is enumerated.
    pub fn new(datum: Arc<RootDatum>, radius: usize, extended: bool) -> Result<Self> {
        let omega_codes: Vec<i64> = if extended {
            match datum.omega() {
                Some(om) => (0..om.len() as i64).collect(),
                None => return Err(Error::InfiniteOmega(datum.spec_string())),
            }
        } else {
            vec![0]
        };
        let gens = datum.generators().to_vec();

        let mut elements: Vec<WeylElement> = omega_codes.iter().map(|&k| datum.omega_element(k)).collect();
        let mut index: HashMap<WeylElement, usize> = elements.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let mut lengths = vec![0; elements.len()];
        let mut omega_of: Vec<usize> = (0..elements.len()).collect();
        let mut frontier: Vec<usize> = (0..elements.len()).collect();
        for l in 1..=radius {
            let mut next = Vec::new();
            for &id in &frontier {
                let x = elements[id];
                for g in &gens {
                    let y = datum.mul(&x, g);
                    if index.contains_key(&y) || datum.length(&y) != l {
                        continue;
                    }
                    index.insert(y, elements.len());
                    next.push(elements.len());
                    elements.push(y);
                    lengths.push(l);
                    omega_of.push(omega_of[id]);
                }
            }
            frontier = next;
        }

        let n = elements.len();
        let lookup = |x: &WeylElement| index.get(x).copied();
        let inverse: Vec<usize> = elements
            .iter()
            .map(|x| lookup(&datum.inverse(x)).expect("balls are closed under inversion"))
            .collect();
        let left: Vec<Vec<Option<usize>>> =
            gens.iter().map(|g| elements.iter().map(|x| lookup(&datum.mul(g, x))).collect()).collect();
        let right: Vec<Vec<Option<usize>>> =
            gens.iter().map(|g| elements.iter().map(|x| lookup(&datum.mul(x, g))).collect()).collect();
        let omegas: Vec<WeylElement> = omega_codes.iter().map(|&k| datum.omega_element(k)).collect();
        let omega_left: Vec<Vec<usize>> = omegas
            .iter()
            .map(|om| elements.iter().map(|x| lookup(&datum.mul(om, x)).expect("Ω preserves length")).collect())
            .collect();
        let core: Vec<usize> = (0..n)
            .map(|id| {
                let om = omegas[omega_of[id]];
                lookup(&datum.mul(&datum.inverse(&om), &elements[id])).expect("core in ball")
            })
            .collect();
        let words = elements.iter().map(|x| datum.word_string(x)).collect();
        Ok(Ball {
            datum,
            radius,
            extended,
            elements,
            index,
            lengths,
            inverse,
            left,
            right,
            omega_codes,
            omega_left,
            omega_of,
            core,
            words,
        })
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn extended(&self) -> bool {
        self.extended
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, id: usize) -> WeylElement {
        self.elements[id]
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn id_of(&self, x: &WeylElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    /// Id of an element given as a word (`s0s1`, `p1s0`, `e`).
    pub fn id_of_word(&self, word: &str) -> Result<usize> {
        let x = self.datum.parse_word(word)?;
        self.id_of(&x).ok_or_else(|| Error::OutsideBall(word.to_string()))
    }

    pub fn length(&self, id: usize) -> usize {
        self.lengths[id]
    }

    pub fn inverse(&self, id: usize) -> usize {
        self.inverse[id]
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn num_generators(&self) -> usize {
        self.left.len()
    }

    /// `s_i · x`, if it lies in the ball.
    pub fn left_mul(&self, i: usize, id: usize) -> Option<usize> {
        self.left[i][id]
    }

    /// `x · s_i`, if it lies in the ball.
    pub fn right_mul(&self, id: usize, i: usize) -> Option<usize> {
        self.right[i][id]
    }

    pub fn is_left_descent(&self, i: usize, id: usize) -> bool {
        self.left[i][id].is_some_and(|y| self.lengths[y] < self.lengths[id])
    }

    pub fn is_right_descent(&self, id: usize, i: usize) -> bool {
        self.right[i][id].is_some_and(|y| self.lengths[y] < self.lengths[id])
    }

    pub fn left_descents(&self, id: usize) -> Vec<usize> {
        (0..self.num_generators()).filter(|&i| self.is_left_descent(i, id)).collect()
    }

    pub fn right_descents(&self, id: usize) -> Vec<usize> {
        (0..self.num_generators()).filter(|&i| self.is_right_descent(id, i)).collect()
    }

    /// Number of Ω-components present (1 for an unextended ball).
    pub fn omega_count(&self) -> usize {
        self.omega_codes.len()
    }

    /// Datum-level code of the `k`-th Ω element of this ball.
    pub fn omega_code(&self, k: usize) -> i64 {
        self.omega_codes[k]
    }

    /// `ω_k · x`.
    pub fn omega_mul(&self, k: usize, id: usize) -> usize {
        self.omega_left[k][id]
    }

    /// Index `k` with `x ∈ ω_k W`.
    pub fn omega_of(&self, id: usize) -> usize {
        self.omega_of[id]
    }

    /// Id of `ω⁻¹ x ∈ W`, where `ω` is the Ω-component of `x`.
    pub fn core(&self, id: usize) -> usize {
        self.core[id]
    }

    /// Ids of the elements lying in `W` itself.
    pub fn core_ids(&self) -> Vec<usize> {
        (0..self.len()).filter(|&id| self.omega_of[id] == 0).collect()
    }

    /// Index of `ω_k⁻¹` among the ball's Ω elements.
    pub fn omega_inverse(&self, k: usize) -> usize {
        let id = self.omega_left[k][0];
        self.omega_of[self.inverse[id]]
    }

    /// Ω-conjugation on generators: `ω_k s_i ω_k⁻¹ = s_{perm[i]}`.
    pub fn omega_conjugation(&self, k: usize) -> Vec<usize> {
        self.datum.omega_conjugation(self.omega_codes[k])
    }

    /// Whether `x` is a minimal-length representative of `x·W_f`.
    pub fn is_min_coset_rep(&self, id: usize) -> bool {
        (1..=self.datum.rank()).all(|i| !self.is_right_descent(id, i))
    }

    pub fn bruhat_leq(&self, x: usize, y: usize) -> bool {
        self.datum.bruhat_leq(&self.elements[x], &self.elements[y])
    }

    pub fn records(&self) -> Vec<BallRecord> {
        (0..self.len())
            .map(|id| {
                let x = self.elements[id];
                let t: Weight = x.translation();
                BallRecord {
                    id,
                    word: self.words[id].clone(),
                    finite_part_word: self.datum.finite_word(&x),
                    translation: t[..self.datum.lattice_rank()].to_vec(),
                    length: self.lengths[id],
                }
            })
            .collect()
    }
}
