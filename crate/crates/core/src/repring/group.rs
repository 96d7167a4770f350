use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite group given by its Cayley table. Element 0 is the identity.
/// Elements are numbered in breadth-first order from the identity, so the
/// numbering is determined by the generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    mul: Vec<Vec<u32>>,
    inv: Vec<u32>,
    generators: Vec<usize>,
}

/// How a finite group is specified in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSpec {
    /// `trivial`, `Z<n>`, `S<n>`, `A<n>`, `V4`.
    Named(String),
    /// Generating permutations of `0..degree`.
    Permutations(Vec<Vec<usize>>),
    /// `Z/n1 × Z/n2 × ...` with elements in mixed-radix order.
    Abelian(Vec<u32>),
    Product(Vec<GroupSpec>),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Named(name) => FiniteGroup::named(name),
            GroupSpec::Permutations(gens) => FiniteGroup::from_permutations("perm", gens),
            GroupSpec::Abelian(orders) => FiniteGroup::abelian(orders),
            GroupSpec::Product(factors) => {
                let mut g = FiniteGroup::trivial();
                for f in factors {
                    g = g.direct_product(&f.build()?);
                }
                Ok(g)
            }
        }
    }
}

fn perm_mul(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (ab)(i) = a(b(i))
    b.iter().map(|&i| a[i]).collect()
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        FiniteGroup { name: "trivial".into(), mul: vec![vec![0]], inv: vec![0], generators: Vec::new() }
    }

    pub fn named(name: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown group {name:?}"));
        let n = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let mut g = match name {
            "trivial" | "1" => FiniteGroup::trivial(),
            "V4" | "Z2xZ2" => FiniteGroup::abelian(&[2, 2])?,
            _ if name.starts_with('Z') => {
                let k = n(&name[1..])?;
                FiniteGroup::abelian(&[u32::try_from(k).map_err(|_| bad())?])?
            }
            _ if name.starts_with('S') => {
                let k = n(&name[1..])?;
                let mut gens = Vec::new();
                if k >= 2 {
                    let mut t: Vec<usize> = (0..k).collect();
                    t.swap(0, 1);
                    gens.push(t);
                    let c: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
                    if k > 2 {
                        gens.push(c);
                    }
                }
                FiniteGroup::from_permutations(name, &gens)?
            }
            _ if name.starts_with('A') => {
                let k = n(&name[1..])?;
                let gens: Vec<Vec<usize>> = (0..k.saturating_sub(2))
                    .map(|i| {
                        let mut p: Vec<usize> = (0..k).collect();
                        p[i] = i + 1;
                        p[i + 1] = i + 2;
                        p[i + 2] = i;
                        p
                    })
                    .collect();
                FiniteGroup::from_permutations(name, &gens)?
            }
            _ => return Err(bad()),
        };
        g.name = name.to_string();
        Ok(g)
    }

    /// Closure of a set of permutations.
    pub fn from_permutations(name: &str, gens: &[Vec<usize>]) -> Result<Self> {
        let degree = gens.first().map_or(0, |g| g.len());
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&i| i >= degree || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::Config(format!("{g:?} is not a permutation of 0..{degree}")));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            for g in gens {
                let p = perm_mul(&elems[a], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                    if elems.len() > 5040 {
                        return Err(Error::Config("permutation group too large".into()));
                    }
                }
            }
        }
        let mul: Vec<Vec<u32>> = elems
            .iter()
            .map(|a| elems.iter().map(|b| index[&perm_mul(a, b)] as u32).collect())
            .collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        FiniteGroup::from_table(name, mul, generators)
    }

    pub fn abelian(orders: &[u32]) -> Result<Self> {
        if orders.iter().any(|&n| n == 0) {
            return Err(Error::Config("cyclic factor of order 0".into()));
        }
        let size: usize = orders.iter().map(|&n| n as usize).product();
        let digits = |mut x: usize| -> Vec<u32> {
            orders
                .iter()
                .map(|&n| {
                    let d = (x % n as usize) as u32;
                    x /= n as usize;
                    d
                })
                .collect()
        };
        let encode = |d: &[u32]| -> u32 {
            let mut x = 0u32;
            for (i, &n) in orders.iter().enumerate().rev() {
                x = x * n + d[i];
            }
            x
        };
        let mul = (0..size)
            .map(|a| {
                let da = digits(a);
                (0..size)
                    .map(|b| {
                        let s: Vec<u32> = da.iter().zip(digits(b)).zip(orders).map(|((x, y), n)| (x + y) % n).collect();
                        encode(&s)
                    })
                    .collect()
            })
            .collect();
        let generators = (0..orders.len())
            .filter(|&i| orders[i] > 1)
            .map(|i| {
                let mut d = vec![0; orders.len()];
                d[i] = 1;
                encode(&d) as usize
            })
            .collect();
        let name = orders.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join("x");
        FiniteGroup::from_table(&name, mul, generators)
    }

    /// Builds a group from a multiplication table, checking the axioms.
    pub fn from_table(name: &str, mul: Vec<Vec<u32>>, generators: Vec<usize>) -> Result<Self> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|r| r.len() != n) {
            return Err(Error::Config("multiplication table is not square".into()));
        }
        if (0..n).any(|a| mul[0][a] as usize != a || mul[a][0] as usize != a) {
            return Err(Error::Config("element 0 is not the identity".into()));
        }
        let mut inv = vec![u32::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a][b] == 0 {
                    inv[a] = b as u32;
                }
            }
            if inv[a] == u32::MAX {
                return Err(Error::Config(format!("element {a} has no inverse")));
            }
        }
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let l = mul[mul[a][b] as usize][c];
                        let r = mul[a][mul[b][c] as usize];
                        if l != r {
                            return Err(Error::Config("multiplication table is not associative".into()));
                        }
                    }
                }
            }
        }
        Ok(FiniteGroup { name: name.to_string(), mul, inv, generators })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn conj(&self, g: usize, h: usize) -> usize {
        // g h g⁻¹
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order()).map(|a| self.element_order(a)).fold(1, num_lcm)
    }

    /// Writes `a` as a word in the generators (breadth-first shortest).
    pub fn word(&self, a: usize) -> Vec<usize> {
        let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        let mut queue = VecDeque::from([0usize]);
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            if x == a {
                break;
            }
            for (k, &g) in self.generators.iter().enumerate() {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    prev.insert(y, (x, k));
                    queue.push_back(y);
                }
            }
        }
        let mut out = Vec::new();
        let mut x = a;
        while x != 0 {
            let (p, k) = prev[&x];
            out.push(k);
            x = p;
        }
        out.reverse();
        out
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order(), other.order());
        let mul = (0..n * m)
            .map(|a| {
                (0..n * m)
                    .map(|b| (self.mul(a / m, b / m) * m + other.mul(a % m, b % m)) as u32)
                    .collect()
            })
            .collect();
        let mut generators: Vec<usize> = self.generators.iter().map(|&g| g * m).collect();
        generators.extend(other.generators.iter().copied());
        FiniteGroup {
            name: format!("{}x{}", self.name, other.name),
            mul,
            inv: (0..n * m).map(|a| (self.inv(a / m) * m + other.inv(a % m)) as u32).collect(),
            generators,
        }
    }

    /// Subgroup generated by a set of elements, as a sorted element list.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        let set: std::collections::HashSet<usize> = elems.iter().copied().collect();
        set.contains(&0) && elems.iter().all(|&a| elems.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    /// Central extension `1 → Z/n → G̃ → G → 1` defined by a normalized
    /// 2-cocycle. Element `(k, g)` of `G̃` has index `k·|G| + g`, so the
    /// central generator is `|G|`.
    pub fn central_extension(&self, cocycle: &Cocycle) -> Result<FiniteGroup> {
        cocycle.validate(self)?;
        let (n, size) = (cocycle.modulus as usize, self.order());
        let mul = (0..n * size)
            .map(|a| {
                let (ka, ga) = (a / size, a % size);
                (0..n * size)
                    .map(|b| {
                        let (kb, gb) = (b / size, b % size);
                        let k = (ka + kb + cocycle.values[ga][gb] as usize) % n;
                        (k * size + self.mul(ga, gb)) as u32
                    })
                    .collect()
            })
            .collect();
        let mut generators = self.generators.clone();
        if n > 1 {
            generators.push(size);
        }
        FiniteGroup::from_table(&format!("{}~{}", self.name, n), mul, generators)
    }
}

fn num_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn num_lcm(a: usize, b: usize) -> usize {
    a / num_gcd(a, b) * b
}

/// A normalized 2-cocycle with values in `Z/modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle {
    pub modulus: u32,
    pub values: Vec<Vec<u32>>,
}

/// How a cocycle is specified in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CocycleSpec {
    Table(Cocycle),
    /// `α(a, b) = Σ B_ij a_i b_j mod n` on an abelian group given by
    /// `GroupSpec::Abelian`.
    Bilinear { modulus: u32, matrix: Vec<Vec<u32>> },
}

impl CocycleSpec {
    pub fn build(&self, group: &GroupSpec, g: &FiniteGroup) -> Result<Cocycle> {
        match self {
            CocycleSpec::Table(c) => {
                c.validate(g)?;
                Ok(c.clone())
            }
            CocycleSpec::Bilinear { modulus, matrix } => {
                let orders = match group {
                    GroupSpec::Abelian(o) => o.clone(),
                    GroupSpec::Named(n) if n == "V4" || n == "Z2xZ2" => vec![2, 2],
                    _ => return Err(Error::Config("bilinear cocycles need an abelian group spec".into())),
                };
                let r = orders.len();
                if matrix.len() != r || matrix.iter().any(|row| row.len() != r) || *modulus == 0 {
                    return Err(Error::Config("bilinear form has the wrong shape".into()));
                }
                for i in 0..r {
                    for j in 0..r {
                        let b = matrix[i][j] as u64;
                        if (b * orders[i] as u64) % *modulus as u64 != 0 || (b * orders[j] as u64) % *modulus as u64 != 0 {
                            return Err(Error::Config("bilinear form is not defined on the group".into()));
                        }
                    }
                }
                let digits = |mut x: usize| -> Vec<u64> {
                    orders
                        .iter()
                        .map(|&n| {
                            let d = (x % n as usize) as u64;
                            x /= n as usize;
                            d
                        })
                        .collect()
                };
                let size = g.order();
                let values = (0..size)
                    .map(|a| {
                        let da = digits(a);
                        (0..size)
                            .map(|b| {
                                let db = digits(b);
                                let mut s = 0u64;
                                for i in 0..r {
                                    for j in 0..r {
                                        s += matrix[i][j] as u64 * da[i] * db[j];
                                    }
                                }
                                (s % *modulus as u64) as u32
                            })
                            .collect()
                    })
                    .collect();
                let c = Cocycle { modulus: *modulus, values };
                c.validate(g)?;
                Ok(c)
            }
        }
    }
}

impl Cocycle {
    pub fn trivial(g: &FiniteGroup) -> Self {
        Cocycle { modulus: 1, values: vec![vec![0; g.order()]; g.order()] }
    }

    pub fn validate(&self, g: &FiniteGroup) -> Result<()> {
        let n = g.order();
        let m = self.modulus;
        if m == 0 || self.values.len() != n || self.values.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= m)) {
            return Err(Error::CocycleDegree("cocycle table has the wrong shape".into()));
        }
        if (0..n).any(|a| self.values[0][a] != 0 || self.values[a][0] != 0) {
            return Err(Error::CocycleDegree("cocycle is not normalized".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let l = self.values[a][b] + self.values[g.mul(a, b)][c];
                    let r = self.values[b][c] + self.values[a][g.mul(b, c)];
                    if l % m != r % m {
                        return Err(Error::CocycleDegree(format!("cocycle identity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_groups() {
        for (name, order, exp) in [("trivial", 1, 1), ("Z2", 2, 2), ("Z3", 3, 3), ("S3", 6, 6), ("A3", 3, 3), ("S4", 24, 12), ("A4", 12, 6), ("V4", 4, 2)] {
            let g = FiniteGroup::named(name).unwrap();
            assert_eq!(g.order(), order, "{name}");
            assert_eq!(g.exponent(), exp, "{name}");
            assert_eq!(g.generated(g.generators()).len(), order);
        }
        assert!(FiniteGroup::named("Q8").is_err());
    }

    #[test]
    fn words_evaluate_back() {
        let g = FiniteGroup::named("S4").unwrap();
        for a in 0..g.order() {
            let x = g.word(a).iter().fold(0, |x, &k| g.mul(x, g.generators()[k]));
            assert_eq!(x, a);
        }
    }

    #[test]
    fn klein_extension_is_dihedral_or_quaternion() {
        let spec = GroupSpec::Abelian(vec![2, 2]);
        let v4 = spec.build().unwrap();
        let c = CocycleSpec::Bilinear { modulus: 2, matrix: vec![vec![0, 1], vec![0, 0]] }.build(&spec, &v4).unwrap();
        let e = v4.central_extension(&c).unwrap();
        assert_eq!(e.order(), 8);
        // nonabelian: the cocycle is not symmetric
        assert!((0..8).any(|a| (0..8).any(|b| e.mul(a, b) != e.mul(b, a))));
        assert!(CocycleSpec::Bilinear { modulus: 4, matrix: vec![vec![0, 1], vec![0, 0]] }.build(&spec, &v4).is_err());
    }

    #[test]
    fn bad_cocycle_rejected() {
        let g = FiniteGroup::named("Z3").unwrap();
        let mut values = vec![vec![0; 3]; 3];
        values[1][1] = 1;
        assert!(Cocycle { modulus: 2, values }.validate(&g).is_err());
    }

    #[test]
    fn products() {
        let g = FiniteGroup::named("S3").unwrap().direct_product(&FiniteGroup::named("Z2").unwrap());
        assert_eq!(g.order(), 12);
        assert_eq!(g.generated(g.generators()).len(), 12);
        assert!(g.is_subgroup(&g.generated(&[g.generators()[0]])));
    }
}
