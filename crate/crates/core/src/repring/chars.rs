use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::group::FiniteGroup;
use crate::error::{Error, Result};

/// Arithmetic in `F_p` for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    /// Reads a residue as a small integer in `(−p/2, p/2)`.
    pub fn lift(self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    fn is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    /// Smallest prime `p ≡ 1 (mod exponent)` with `p > floor`.
    pub fn for_group(exponent: u64, floor: u64) -> Fp {
        let mut p = (floor / exponent + 1) * exponent + 1;
        while !Fp::is_prime(p) {
            p += exponent;
        }
        Fp { p }
    }

    /// A generator of the multiplicative group.
    pub fn primitive_root(self) -> u64 {
        let mut factors = Vec::new();
        let mut m = self.p - 1;
        let mut d = 2;
        while d * d <= m {
            if m % d == 0 {
                factors.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        (2..self.p).find(|&g| factors.iter().all(|&q| self.pow(g, (self.p - 1) / q) != 1)).expect("prime field")
    }
}

/// Row-reduces in place and returns a basis of the null space.
fn null_space(f: Fp, mut a: Vec<Vec<u64>>, cols: usize) -> Vec<Vec<u64>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(r) = (row..a.len()).find(|&r| a[r][col] != 0) else { continue };
        a.swap(row, r);
        let inv = f.inv(a[row][col]);
        for x in a[row].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..a.len() {
            if r != row && a[r][col] != 0 {
                let k = a[r][col];
                for c in 0..cols {
                    a[r][c] = f.sub(a[r][c], f.mul(k, a[row][c]));
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0; cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.sub(0, a[i][fc]);
            }
            v
        })
        .collect()
}

/// Characteristic polynomial by Faddeev–LeVerrier, coefficients from the
/// constant term up; needs `p > n`.
fn char_poly(f: Fp, m: &[Vec<u64>]) -> Vec<u64> {
    let n = m.len();
    let mut coeffs = vec![0; n + 1];
    coeffs[n] = 1;
    let mut mk = vec![vec![0; n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0;
                for l in 0..n {
                    s = f.add(s, f.mul(m[i][l], mk[l][j]));
                }
                next[i][j] = s;
            }
            next[i][i] = f.add(next[i][i], coeffs[n - k + 1]);
        }
        mk = next;
        let mut tr = 0;
        for i in 0..n {
            let mut s = 0;
            for l in 0..n {
                s = f.add(s, f.mul(m[i][l], mk[l][i]));
            }
            tr = f.add(tr, s);
        }
        coeffs[n - k] = f.sub(0, f.mul(tr, f.inv(k as u64)));
    }
    coeffs
}

/// Irreducible characters of a subgroup of some ambient group, with values
/// in `F_p`. Characters are stored per element of the subgroup.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    field: Fp,
    elements: Vec<usize>,
    position: HashMap<usize, usize>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    irreps: Vec<Vec<u64>>,
    dims: Vec<u64>,
}

impl CharacterTable {
    /// Dixon's method: common eigenvectors of the class multiplication
    /// matrices over `F_p` give the central characters.
    pub fn compute(g: &FiniteGroup, elements: &[usize], field: Fp) -> Result<Self> {
        let mut elements = elements.to_vec();
        elements.sort_unstable();
        elements.dedup();
        let order = elements.len() as u64;
        if order == 0 || elements[0] != 0 || !g.is_subgroup(&elements) {
            return Err(Error::Rep("element set is not a subgroup".into()));
        }
        if field.p <= 2 * order * order {
            return Err(Error::Rep(format!("prime {} too small for a group of order {order}", field.p)));
        }
        let position: HashMap<usize, usize> = elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = elements.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let mut cls: Vec<usize> = elements.iter().map(|&h| position[&g.conj(h, elements[i])]).collect();
            cls.sort_unstable();
            cls.dedup();
            for &c in &cls {
                class_of[c] = classes.len();
            }
            classes.push(cls);
        }
        let r = classes.len();
        // a[i][j][k] = #{(x, y) : x ∈ C_i, y ∈ C_j, xy = z_k}
        let mut a = vec![vec![vec![0u64; r]; r]; r];
        for (k, ck) in classes.iter().enumerate() {
            let z = elements[ck[0]];
            for (i, ci) in classes.iter().enumerate() {
                for &x in ci {
                    let y = g.mul(g.inv(elements[x]), z);
                    if let Some(&py) = position.get(&y) {
                        a[i][class_of[py]][k] += 1;
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut vectors = None;
        for _ in 0..64 {
            let coeffs: Vec<u64> = (0..r).map(|_| rng.gen_range(0..field.p)).collect();
            let m: Vec<Vec<u64>> = (0..r)
                .map(|j| (0..r).map(|k| (0..r).fold(0, |s, i| field.add(s, field.mul(coeffs[i], a[i][j][k] % field.p)))).collect())
                .collect();
            let poly = char_poly(field, &m);
            let mut found = Vec::new();
            for lambda in 0..field.p {
                let val = poly.iter().rev().fold(0, |s, &c| field.add(field.mul(s, lambda), c));
                if val != 0 {
                    continue;
                }
                let shifted: Vec<Vec<u64>> = (0..r)
                    .map(|j| (0..r).map(|k| if j == k { field.sub(m[j][k], lambda) } else { m[j][k] }).collect())
                    .collect();
                let ker = null_space(field, shifted, r);
                if ker.len() != 1 {
                    break;
                }
                found.push(ker.into_iter().next().unwrap());
                if found.len() == r {
                    break;
                }
            }
            if found.len() == r {
                vectors = Some(found);
                break;
            }
        }
        let vectors = vectors.ok_or_else(|| Error::Rep("could not separate the central characters".into()))?;
        let inv_class: Vec<usize> = classes.iter().map(|c| class_of[position[&g.inv(elements[c[0]])]]).collect();
        let mut chars: Vec<(u64, Vec<u64>)> = Vec::new();
        for v in vectors {
            let w: Vec<u64> = {
                let s = field.inv(v[0]);
                v.iter().map(|&x| field.mul(x, s)).collect()
            };
            let mut sum = 0;
            for k in 0..r {
                sum = field.add(sum, field.mul(field.mul(w[k], w[inv_class[k]]), field.inv(classes[k].len() as u64)));
            }
            let d2 = field.mul(order % field.p, field.inv(sum));
            let d = (1..=order).take_while(|d| d * d <= order).find(|d| d * d == d2).ok_or_else(|| {
                Error::Rep("degree of a character is not an integer".into())
            })?;
            let values: Vec<u64> =
                (0..r).map(|k| field.mul(field.mul(w[k], d), field.inv(classes[k].len() as u64))).collect();
            chars.push((d, values));
        }
        if chars.iter().map(|(d, _)| d * d).sum::<u64>() != order {
            return Err(Error::Rep("sum of squared degrees differs from the group order".into()));
        }
        // trivial first, then by degree and values
        chars.sort();
        let dims = chars.iter().map(|c| c.0).collect();
        let irreps = chars.into_iter().map(|(_, vals)| (0..n).map(|i| vals[class_of[i]]).collect()).collect();
        Ok(CharacterTable { field, elements, position, class_of, classes, irreps, dims })
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn position(&self, x: usize) -> Option<usize> {
        self.position.get(&x).copied()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, pos: usize) -> usize {
        self.class_of[pos]
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn character(&self, i: usize) -> &[u64] {
        &self.irreps[i]
    }

    pub fn dim(&self, i: usize) -> u64 {
        self.dims[i]
    }

    /// `(1/|H|) Σ_h a(h) b(h⁻¹)` read as a nonnegative integer.
    pub fn inner(&self, g: &FiniteGroup, a: &[u64], b: &[u64]) -> Result<u64> {
        inner_product(self.field, g, &self.elements, &self.position, a, b)
    }

    /// Multiplicities of the irreducibles in a character.
    pub fn decompose(&self, g: &FiniteGroup, chi: &[u64]) -> Result<Vec<u64>> {
        let out: Vec<u64> = (0..self.len()).map(|i| self.inner(g, chi, &self.irreps[i])).collect::<Result<_>>()?;
        let check: u64 = out.iter().zip(&self.dims).map(|(m, d)| m * d).sum();
        if self.field.lift(chi[0]) != check as i64 {
            return Err(Error::Rep("class function is not a character".into()));
        }
        Ok(out)
    }
}

/// `(1/|H|) Σ_{h ∈ H} a(h) b(h⁻¹)` for class functions stored per element
/// of `H`, required to be a small nonnegative integer.
pub fn inner_product(
    field: Fp,
    g: &FiniteGroup,
    elements: &[usize],
    position: &HashMap<usize, usize>,
    a: &[u64],
    b: &[u64],
) -> Result<u64> {
    let mut s = 0;
    for (i, &h) in elements.iter().enumerate() {
        s = field.add(s, field.mul(a[i], b[position[&g.inv(h)]]));
    }
    let v = field.mul(s, field.inv(elements.len() as u64 % field.p));
    let lifted = field.lift(v);
    if lifted < 0 || lifted as u64 > (g.order() as u64).pow(2) {
        return Err(Error::Rep(format!("inner product {lifted} is not a multiplicity")));
    }
    Ok(lifted as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(name: &str) -> (FiniteGroup, CharacterTable) {
        let g = FiniteGroup::named(name).unwrap();
        let f = Fp::for_group(g.exponent() as u64, 2 * (g.order() as u64).pow(2));
        let all: Vec<usize> = (0..g.order()).collect();
        let t = CharacterTable::compute(&g, &all, f).unwrap();
        (g, t)
    }

    #[test]
    fn degrees() {
        for (name, dims) in [
            ("trivial", vec![1]),
            ("Z2", vec![1, 1]),
            ("Z3", vec![1, 1, 1]),
            ("S3", vec![1, 1, 2]),
            ("A4", vec![1, 1, 1, 3]),
            ("S4", vec![1, 1, 2, 3, 3]),
            ("V4", vec![1, 1, 1, 1]),
        ] {
            let (_, t) = table(name);
            let got: Vec<u64> = (0..t.len()).map(|i| t.dim(i)).collect();
            assert_eq!(got, dims, "{name}");
            assert!(t.character(0).iter().all(|&v| v == 1), "{name}: trivial first");
        }
    }

    #[test]
    fn orthogonality() {
        for name in ["S3", "A4", "S4", "Z3"] {
            let (g, t) = table(name);
            for i in 0..t.len() {
                for j in 0..t.len() {
                    assert_eq!(t.inner(&g, t.character(i), t.character(j)).unwrap(), u64::from(i == j));
                }
            }
        }
    }

    #[test]
    fn s3_values() {
        let (_, t) = table("S3");
        let f = t.field();
        // the 2-dimensional character is 2, 0, -1 on identity, transpositions, 3-cycles
        let std = t.character(2);
        let mut vals: Vec<i64> = std.iter().map(|&v| f.lift(v)).collect();
        vals.sort_unstable();
        assert_eq!(vals, vec![-1, -1, 0, 0, 0, 2]);
    }

    #[test]
    fn field_helpers() {
        let f = Fp::for_group(6, 100);
        assert_eq!(f.p % 6, 1);
        assert!(f.p > 100);
        let g = f.primitive_root();
        assert_eq!(f.pow(g, f.p - 1), 1);
        assert_eq!(f.mul(f.inv(5), 5), 1);
        assert_eq!(f.lift(f.from_i64(-3)), -3);
        let m = vec![vec![2, 1], vec![0, 3]];
        // (x − 2)(x − 3) = x² − 5x + 6
        assert_eq!(char_poly(f, &m), vec![6, f.from_i64(-5) as u64, 1]);
    }
}
