//! Convolution algebras `K_F(X×X)` of equivariant sheaves on `X×X` for a
//! finite set `X` of centrally extended points.
//!
//! Twists are modelled by one central extension `F̃` of `F` by `Z/n`: each
//! point carries a degree `r`, and sheaves at `x` are representations of
//! the preimage of its stabilizer on which the kernel acts through `ω^r`.
//! On `X×X` the extension at `(x, y)` is that of `x` times the opposite of
//! that of `y`, so basis elements over `(x, y)` live in degree `r_x − r_y`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repring::{inner_product, CharacterTable, FiniteGroup, FiniteRep, Irrep, RepRing, RepRingSpec};
use crate::verify::{BasedAlgebra, Product};

/// How `F` acts on the points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Trivial,
    /// Images of the points under each generator of `F`, in the order of
    /// the group's generator list.
    Generators(Vec<Vec<usize>>),
}

/// A finite `F`-set whose points carry central-extension degrees. The
/// degree must be constant on orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentrallyExtendedSet {
    pub size: usize,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degrees: Vec<u32>,
}

impl CentrallyExtendedSet {
    pub fn trivial(size: usize) -> Self {
        CentrallyExtendedSet { size, action: Action::Trivial, degrees: Vec::new() }
    }

    pub fn with_degrees(mut self, degrees: Vec<u32>) -> Self {
        self.degrees = degrees;
        self
    }

    /// Disjoint union of coset spaces `F/H`, one per entry `(generators of
    /// H, degree)`. Cosets are numbered by their smallest element.
    pub fn from_cosets(g: &FiniteGroup, orbits: &[(Vec<usize>, u32)]) -> Self {
        let mut point_of: Vec<HashMap<usize, usize>> = Vec::new();
        let mut degrees = Vec::new();
        for (gens, degree) in orbits {
            let h = g.generated(gens);
            let mut map = HashMap::new();
            for a in 0..g.order() {
                if map.contains_key(&a) {
                    continue;
                }
                let p = degrees.len();
                degrees.push(*degree);
                for &x in &h {
                    map.insert(g.mul(a, x), p);
                }
            }
            point_of.push(map);
        }
        let images = g
            .generators()
            .iter()
            .map(|&s| {
                let mut img = vec![0; degrees.len()];
                for map in &point_of {
                    for (&a, &p) in map {
                        img[p] = map[&g.mul(s, a)];
                    }
                }
                img
            })
            .collect();
        CentrallyExtendedSet { size: degrees.len(), action: Action::Generators(images), degrees }
    }

    fn degree(&self, x: usize) -> u32 {
        self.degrees.get(x).copied().unwrap_or(0)
    }

    /// The permutation of every element of `F`, as a left action.
    fn realize(&self, g: &FiniteGroup) -> Result<Vec<Vec<usize>>> {
        let id: Vec<usize> = (0..self.size).collect();
        let gens: Vec<Vec<usize>> = match &self.action {
            Action::Trivial => vec![id.clone(); g.generators().len()],
            Action::Generators(imgs) => imgs.clone(),
        };
        if gens.len() != g.generators().len() {
            return Err(Error::Config(format!("{} generator images for {} generators", gens.len(), g.generators().len())));
        }
        for p in &gens {
            let mut seen = vec![false; self.size];
            if p.len() != self.size || p.iter().any(|&i| i >= self.size || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::Config("generator image is not a permutation of the points".into()));
            }
        }
        let mut perm: Vec<Option<Vec<usize>>> = vec![None; g.order()];
        perm[0] = Some(id);
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(a) = queue.pop_front() {
            let pa = perm[a].clone().expect("queued elements are known");
            for (s, ps) in g.generators().iter().zip(&gens) {
                let b = g.mul(*s, a);
                let pb: Vec<usize> = pa.iter().map(|&i| ps[i]).collect();
                match &perm[b] {
                    Some(q) if *q != pb => return Err(Error::Config("generator images do not define an action".into())),
                    Some(_) => {}
                    None => {
                        perm[b] = Some(pb);
                        queue.push_back(b);
                    }
                }
            }
        }
        Ok(perm.into_iter().map(|p| p.expect("generators generate")).collect())
    }
}

/// A target for the comparison harness: the group and the set it acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvTarget {
    pub group: RepRingSpec,
    pub set: CentrallyExtendedSet,
}

/// An `F`-orbit on `X×X` with its stabilizer and the irreducibles of the
/// right degree.
#[derive(Clone, Debug, Serialize)]
pub struct PairOrbit {
    pub rep: (usize, usize),
    pub size: usize,
    /// Preimage in `F̃` of the stabilizer of `rep` (empty for connected `F`).
    pub stabilizer: Vec<usize>,
    pub degree: u32,
}

/// An irreducible equivariant sheaf: an orbit and an irreducible of its
/// stabilizer. For finite groups the label is `[index in the stabilizer's
/// character table, degree]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvBasisElt {
    pub orbit: usize,
    pub source: usize,
    pub target: usize,
    pub irrep: Irrep,
}

#[derive(Debug)]
pub struct ConvAlgebra {
    ring: RepRing,
    set: CentrallyExtendedSet,
    bound: u64,
    perms: Vec<Vec<usize>>,
    point_orbit: Vec<usize>,
    /// Orbit index of `(x, y)` at `x·|X| + y`.
    pair_orbit: Vec<usize>,
    /// An element of `F` carrying the orbit representative to `(x, y)`.
    transport: Vec<usize>,
    orbits: Vec<PairOrbit>,
    basis: Vec<ConvBasisElt>,
    lookup: HashMap<(usize, Vec<i64>), usize>,
}

fn value(t: &CharacterTable, irrep: usize, h: usize) -> u64 {
    t.character(irrep)[t.position(h).expect("element of the subgroup")]
}

impl ConvAlgebra {
    /// Enumerates the basis. For connected groups the action must be
    /// trivial and `bound` caps the size proxy of labels; finite groups
    /// give finite algebras and ignore it.
    pub fn build(spec: &RepRingSpec, set: &CentrallyExtendedSet, bound: u64) -> Result<Self> {
        let ring = RepRing::from_spec(spec)?;
        let n = set.size;
        if !set.degrees.is_empty() && set.degrees.len() != n {
            return Err(Error::Config(format!("{} degrees for {n} points", set.degrees.len())));
        }
        let modulus = ring.modulus();
        if (0..n).any(|x| set.degree(x) >= modulus) {
            return Err(Error::CocycleDegree(format!("point degrees must be below {modulus}")));
        }
        let perms = match &ring {
            RepRing::Reductive(_) => {
                if let Action::Generators(imgs) = &set.action {
                    if imgs.iter().any(|p| p.iter().enumerate().any(|(i, &j)| i != j)) {
                        return Err(Error::Config("a connected group can only act trivially on a finite set".into()));
                    }
                }
                vec![(0..n).collect()]
            }
            RepRing::Finite(f) => set.realize(f.base())?,
        };
        let mut point_orbit = vec![usize::MAX; n];
        let mut next = 0;
        for x in 0..n {
            if point_orbit[x] == usize::MAX {
                for p in &perms {
                    point_orbit[p[x]] = next;
                }
                next += 1;
            }
        }
        for x in 0..n {
            for p in &perms {
                if set.degree(p[x]) != set.degree(x) {
                    return Err(Error::CocycleDegree("degree is not constant on an orbit".into()));
                }
            }
        }
        let mut pair_orbit = vec![usize::MAX; n * n];
        let mut transport = vec![0; n * n];
        let mut orbits = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if pair_orbit[x * n + y] != usize::MAX {
                    continue;
                }
                let id = orbits.len();
                let mut size = 0;
                let mut stab = Vec::new();
                for (g, p) in perms.iter().enumerate() {
                    let k = p[x] * n + p[y];
                    if pair_orbit[k] == usize::MAX {
                        pair_orbit[k] = id;
                        transport[k] = g;
                        size += 1;
                    }
                    if k == x * n + y {
                        stab.push(g);
                    }
                }
                let degree = (set.degree(x) + modulus - set.degree(y)) % modulus;
                let stabilizer = match &ring {
                    RepRing::Finite(f) => f.preimage(&stab),
                    RepRing::Reductive(_) => Vec::new(),
                };
                orbits.push(PairOrbit { rep: (x, y), size, stabilizer, degree });
            }
        }
        let mut basis = Vec::new();
        for (o, orbit) in orbits.iter().enumerate() {
            let irreps: Vec<Irrep> = match &ring {
                RepRing::Reductive(_) => ring.irreps(bound, orbit.degree)?,
                RepRing::Finite(f) => {
                    let t = f.table(&orbit.stabilizer)?;
                    f.sector(&t, orbit.degree)?
                        .into_iter()
                        .map(|i| Irrep { label: vec![i as i64, orbit.degree as i64], dim: t.dim(i) })
                        .collect()
                }
            };
            for irrep in irreps {
                basis.push(ConvBasisElt { orbit: o, source: orbit.rep.0, target: orbit.rep.1, irrep });
            }
        }
        let lookup = basis.iter().enumerate().map(|(i, b)| ((b.orbit, b.irrep.label.clone()), i)).collect();
        Ok(ConvAlgebra { ring, set: set.clone(), bound, perms, point_orbit, pair_orbit, transport, orbits, basis, lookup })
    }

    pub fn ring(&self) -> &RepRing {
        &self.ring
    }

    pub fn set(&self) -> &CentrallyExtendedSet {
        &self.set
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn basis(&self) -> &[ConvBasisElt] {
        &self.basis
    }

    pub fn orbits(&self) -> &[PairOrbit] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn label(&self, i: usize) -> String {
        let b = &self.basis[i];
        match &self.ring {
            RepRing::Reductive(_) => {
                let l: Vec<String> = b.irrep.label.iter().map(i64::to_string).collect();
                format!("E_{}{}⊗V({})", b.source, b.target, l.join(","))
            }
            RepRing::Finite(_) => format!("O{}({},{})⊗χ{}", b.orbit, b.source, b.target, b.irrep.label[0]),
        }
    }

    /// Index of the basis element over `orbit` with the given label.
    pub fn find(&self, orbit: usize, label: &[i64]) -> Option<usize> {
        self.lookup.get(&(orbit, label.to_vec())).copied()
    }

    /// Orbit of the pair `(x, y)`.
    pub fn orbit_of(&self, x: usize, y: usize) -> usize {
        self.pair_orbit[x * self.set.size + y]
    }

    fn finite(&self) -> &FiniteRep {
        match &self.ring {
            RepRing::Finite(f) => f,
            RepRing::Reductive(_) => unreachable!("finite-group path"),
        }
    }

    /// `Σ` over diagonal orbits of the trivial irreducible.
    pub fn identity_element(&self) -> Vec<usize> {
        let triv = self.ring.trivial().label;
        let mut out: Vec<usize> = self
            .orbits
            .iter()
            .enumerate()
            .filter(|(_, o)| o.rep.0 == o.rep.1)
            .filter_map(|(i, _)| self.find(i, &triv))
            .collect();
        out.sort_unstable();
        out
    }

    /// Convolution of two basis elements.
    pub fn convolve(&self, i: usize, j: usize) -> Result<Product> {
        match &self.ring {
            RepRing::Reductive(g) => {
                let (a, b) = (&self.basis[i], &self.basis[j]);
                if a.target != b.source {
                    return Ok(Product { terms: Vec::new(), complete: true });
                }
                let o = self.orbit_of(a.source, b.target);
                let mut p = Product { terms: Vec::new(), complete: true };
                for (v, m) in self.ring.tensor_decompose(&a.irrep, &b.irrep)? {
                    match self.find(o, &v.label) {
                        Some(k) if g.proxy(&v.label) <= self.bound => p.terms.push((k, m)),
                        _ => p.complete = false,
                    }
                }
                p.terms.sort_unstable();
                Ok(p)
            }
            RepRing::Finite(_) => self.mackey(i, j),
        }
    }

    /// Finite groups: fix the representative `(x1, y1)` of the first orbit;
    /// the fibre of `pr₁₃` over the orbits it meets is a union of
    /// `H1`-orbits of points `z` with `(y1, z)` in the second orbit. Each
    /// contributes the induction from `K = Stab(x1, y1, z)` of `V ⊗ W^g`,
    /// and Frobenius reciprocity reduces the multiplicities to inner
    /// products on `K`.
    fn mackey(&self, i: usize, j: usize) -> Result<Product> {
        let f = self.finite();
        let g = f.group();
        let n = self.set.size;
        let (a, b) = (&self.basis[i], &self.basis[j]);
        let (o1, o2) = (&self.orbits[a.orbit], &self.orbits[b.orbit]);
        let (x1, y1) = o1.rep;
        let t1 = f.table(&o1.stabilizer)?;
        let t2 = f.table(&o2.stabilizer)?;
        let (v, w) = (a.irrep.label[0] as usize, b.irrep.label[0] as usize);
        let mut acc: HashMap<usize, u64> = HashMap::new();
        let mut seen = vec![false; n];
        for z in 0..n {
            if seen[z] || self.orbit_of(y1, z) != b.orbit {
                continue;
            }
            let mut k = Vec::new();
            for &h in &o1.stabilizer {
                let p = &self.perms[f.project(h)];
                seen[p[z]] = true;
                if p[z] == z {
                    k.push(h);
                }
            }
            let position: HashMap<usize, usize> = k.iter().enumerate().map(|(i, &h)| (h, i)).collect();
            let tg = self.transport[y1 * n + z];
            let tg_inv = g.inv(tg);
            let u: Vec<u64> =
                k.iter().map(|&h| f.field().mul(value(&t1, v, h), value(&t2, w, g.conj(tg_inv, h)))).collect();
            let o3 = self.orbit_of(x1, z);
            let t3 = f.table(&self.orbits[o3].stabilizer)?;
            let tg3 = self.transport[x1 * n + z];
            let tg3_inv = g.inv(tg3);
            for rho in f.sector(&t3, self.orbits[o3].degree)? {
                let chi: Vec<u64> = k.iter().map(|&h| value(&t3, rho, g.conj(tg3_inv, h))).collect();
                let m = inner_product(f.field(), g, &k, &position, &u, &chi)?;
                if m > 0 {
                    let idx = self.find(o3, &[rho as i64, self.orbits[o3].degree as i64]).expect("sector irreducible");
                    *acc.entry(idx).or_insert(0) += m;
                }
            }
        }
        let mut terms: Vec<(usize, u64)> = acc.into_iter().collect();
        terms.sort_unstable();
        Ok(Product { terms, complete: true })
    }

    /// Brute-force convolution for finite groups. At the representative
    /// `(x3, z3)` of each orbit, the stalk of the product is the sum over
    /// `y` of the stalks of the two sheaves at `(x3, y)` and `(y, z3)`; an
    /// element of the stabilizer permutes the summands, so its trace only
    /// sees the `y` it fixes. Stalk actions are transported from the orbit
    /// representatives.
    pub fn convolve_oracle(&self, i: usize, j: usize) -> Result<Product> {
        let RepRing::Finite(f) = &self.ring else {
            return Err(Error::Config("the groupoid oracle needs a finite group".into()));
        };
        let g = f.group();
        let field = f.field();
        let n = self.set.size;
        let (a, b) = (&self.basis[i], &self.basis[j]);
        let t1 = f.table(&self.orbits[a.orbit].stabilizer)?;
        let t2 = f.table(&self.orbits[b.orbit].stabilizer)?;
        let (v, w) = (a.irrep.label[0] as usize, b.irrep.label[0] as usize);
        let stalk = |t: &CharacterTable, irrep: usize, x: usize, y: usize, h: usize| {
            let tr = self.transport[x * n + y];
            value(t, irrep, g.conj(g.inv(tr), h))
        };
        let mut terms = Vec::new();
        for (o3, orbit) in self.orbits.iter().enumerate() {
            let (x3, z3) = orbit.rep;
            let t3 = f.table(&orbit.stabilizer)?;
            let chi: Vec<u64> = t3
                .elements()
                .iter()
                .map(|&h| {
                    let p = &self.perms[f.project(h)];
                    (0..n)
                        .filter(|&y| p[y] == y && self.orbit_of(x3, y) == a.orbit && self.orbit_of(y, z3) == b.orbit)
                        .fold(0, |s, y| field.add(s, field.mul(stalk(&t1, v, x3, y, h), stalk(&t2, w, y, z3, h))))
                })
                .collect();
            for (rho, m) in t3.decompose(g, &chi)?.into_iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let idx = self.find(o3, &[rho as i64, orbit.degree as i64]).ok_or_else(|| {
                    Error::Invariant(format!("convolution leaves the degree {} sector of orbit {o3}", orbit.degree))
                })?;
                terms.push((idx, m));
            }
        }
        terms.sort_unstable();
        Ok(Product { terms, complete: true })
    }

    /// The based algebra: all products, the identity summands as the
    /// distinguished set, point orbits of source and target as row and
    /// column classes, the label proxy as grade.
    pub fn to_based(&self) -> Result<BasedAlgebra> {
        let n = self.len();
        let products: Vec<Product> =
            (0..n * n).into_par_iter().map(|k| self.convolve(k / n, k % n)).collect::<Result<_>>()?;
        let classes = self.point_orbit.iter().max().map_or(0, |m| m + 1);
        let names: Vec<String> = (0..classes)
            .map(|c| {
                let pts: Vec<String> =
                    (0..self.set.size).filter(|&x| self.point_orbit[x] == c).map(|x| x.to_string()).collect();
                format!("x{}", pts.join("|"))
            })
            .collect();
        let grade = self
            .basis
            .iter()
            .map(|b| match &self.ring {
                RepRing::Reductive(g) => g.proxy(&b.irrep.label),
                RepRing::Finite(_) => 0,
            })
            .collect();
        let alg = BasedAlgebra {
            name: format!("K[{} points, bound {}]", self.set.size, self.bound),
            labels: (0..n).map(|i| self.label(i)).collect(),
            products,
            distinguished: self.identity_element(),
            rows: self.basis.iter().map(|b| self.point_orbit[b.source]).collect(),
            cols: self.basis.iter().map(|b| self.point_orbit[b.target]).collect(),
            row_names: names.clone(),
            col_names: names,
            grade,
        };
        alg.validate()?;
        Ok(alg)
    }
}

/// Every action of `g` on `0..size`, as generator images, found by trying
/// all assignments of permutations to generators.
pub fn all_actions(g: &FiniteGroup, size: usize) -> Vec<Vec<Vec<usize>>> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 0..size {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, k);
                    q
                })
            })
            .collect();
    }
    perms.sort();
    let r = g.generators().len();
    let mut choices: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..r {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                perms.iter().map(move |p| {
                    let mut c = c.clone();
                    c.push(p.clone());
                    c
                })
            })
            .collect();
    }
    choices
        .into_iter()
        .filter(|imgs| {
            let set = CentrallyExtendedSet { size, action: Action::Generators(imgs.clone()), degrees: Vec::new() };
            set.realize(g).is_ok()
        })
        .collect()
}

#[cfg(test)]
mod tests;
