//! Representation rings of the groups that appear on the geometric side:
//! small connected reductive groups through their fusion rules, and finite
//! groups, possibly with a central extension, through character tables
//! computed over a prime field.

mod chars;
mod group;
mod reductive;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chars::{inner_product, CharacterTable, Fp};
pub use group::{Cocycle, CocycleSpec, FiniteGroup, GroupSpec};
pub use reductive::Reductive;

/// JSON description of a representation ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepRingSpec {
    Sl2,
    Pgl2,
    Gl2,
    Torus { rank: usize },
    Finite { group: GroupSpec },
    TwistedFinite { group: GroupSpec, cocycle: CocycleSpec },
    Product { factors: Vec<RepRingSpec> },
}

/// An irreducible: its label and dimension. For finite groups the label is
/// `[index, degree]`, the index referring to the character table of the
/// (extended) group and the degree to the central character.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Irrep {
    pub label: Vec<i64>,
    pub dim: u64,
}

/// Representation theory of a finite group `F` and of a central extension
/// `1 → Z/n → F̃ → F → 1`. All characters live in one prime field that
/// contains the `n`-th roots of unity.
#[derive(Debug)]
pub struct FiniteRep {
    base: FiniteGroup,
    ext: FiniteGroup,
    modulus: u32,
    field: Fp,
    omega: u64,
    tables: Mutex<HashMap<Vec<usize>, Arc<CharacterTable>>>,
}

impl FiniteRep {
    pub fn new(base: FiniteGroup, cocycle: Option<Cocycle>) -> Result<Self> {
        let cocycle = cocycle.unwrap_or_else(|| Cocycle::trivial(&base));
        let ext = if cocycle.modulus > 1 { base.central_extension(&cocycle)? } else { base.clone() };
        let order = ext.order() as u64;
        let field = Fp::for_group(ext.exponent() as u64, 2 * order * order);
        let modulus = cocycle.modulus;
        let omega = field.pow(field.primitive_root(), (field.p - 1) / modulus as u64);
        Ok(FiniteRep { base, ext, modulus, field, omega, tables: Mutex::new(HashMap::new()) })
    }

    pub fn base(&self) -> &FiniteGroup {
        &self.base
    }

    /// The extended group `F̃` (equal to `F` when there is no twist).
    pub fn group(&self) -> &FiniteGroup {
        &self.ext
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    /// Image in `F` of an element of `F̃`.
    pub fn project(&self, x: usize) -> usize {
        x % self.base.order()
    }

    /// Central element of `F̃` generating the kernel.
    pub fn central(&self) -> usize {
        if self.modulus > 1 {
            self.base.order()
        } else {
            0
        }
    }

    /// Preimage in `F̃` of a subgroup of `F`.
    pub fn preimage(&self, h: &[usize]) -> Vec<usize> {
        let n = self.base.order();
        let mut out: Vec<usize> = (0..self.modulus as usize).flat_map(|k| h.iter().map(move |&g| k * n + g)).collect();
        out.sort_unstable();
        out
    }

    /// Character table of a subgroup of `F̃`, cached.
    pub fn table(&self, sub: &[usize]) -> Result<Arc<CharacterTable>> {
        let mut key = sub.to_vec();
        key.sort_unstable();
        key.dedup();
        if let Some(t) = self.tables.lock().expect("table cache").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(CharacterTable::compute(&self.ext, &key, self.field)?);
        self.tables.lock().expect("table cache").insert(key, t.clone());
        Ok(t)
    }

    pub fn full_table(&self) -> Result<Arc<CharacterTable>> {
        let all: Vec<usize> = (0..self.ext.order()).collect();
        self.table(&all)
    }

    /// Degree `r` with `χ(z) = ω^r χ(1)` for the central generator `z`.
    /// The subgroup must contain the kernel of `F̃ → F`.
    pub fn degree(&self, table: &CharacterTable, irrep: usize) -> Result<u32> {
        let f = self.field;
        let z = table.position(self.central()).ok_or_else(|| Error::Rep("subgroup does not contain the centre".into()))?;
        let chi = table.character(irrep);
        let ratio = f.mul(chi[z], f.inv(chi[0]));
        (0..self.modulus)
            .find(|&r| f.pow(self.omega, r as u64) == ratio)
            .ok_or_else(|| Error::CocycleDegree("central element does not act by a scalar root of unity".into()))
    }

    /// Irreducibles of a subgroup of `F̃` of the given degree.
    pub fn sector(&self, table: &CharacterTable, degree: u32) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..table.len() {
            if self.degree(table, i)? == degree % self.modulus {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Restriction of an irreducible of a subgroup `big` to a subgroup
    /// `small ⊂ big`, both of `F̃`; multiplicities in `small`'s table.
    pub fn restrict(&self, big: &[usize], irrep: usize, small: &[usize]) -> Result<Vec<u64>> {
        let tb = self.table(big)?;
        let ts = self.table(small)?;
        let chi: Vec<u64> = ts
            .elements()
            .iter()
            .map(|&x| tb.position(x).map(|p| tb.character(irrep)[p]).ok_or_else(|| Error::Rep("not a subgroup".into())))
            .collect::<Result<_>>()?;
        ts.decompose(&self.ext, &chi)
    }

    /// Induction from `small ⊂ big` by Frobenius reciprocity.
    pub fn induce(&self, small: &[usize], irrep: usize, big: &[usize]) -> Result<Vec<u64>> {
        let tb = self.table(big)?;
        (0..tb.len()).map(|j| Ok(self.restrict(big, j, small)?[irrep])).collect()
    }
}

/// A representation ring ready for computation.
#[derive(Debug, Clone)]
pub enum RepRing {
    Reductive(Reductive),
    Finite(Arc<FiniteRep>),
}

impl RepRing {
    pub fn from_spec(spec: &RepRingSpec) -> Result<Self> {
        let r = match spec {
            RepRingSpec::Sl2 => RepRing::Reductive(Reductive::Sl2),
            RepRingSpec::Pgl2 => RepRing::Reductive(Reductive::Pgl2),
            RepRingSpec::Gl2 => RepRing::Reductive(Reductive::Gl2),
            RepRingSpec::Torus { rank } => RepRing::Reductive(Reductive::Torus(*rank)),
            RepRingSpec::Finite { group } => RepRing::Finite(Arc::new(FiniteRep::new(group.build()?, None)?)),
            RepRingSpec::TwistedFinite { group, cocycle } => {
                let g = group.build()?;
                let c = cocycle.build(group, &g)?;
                RepRing::Finite(Arc::new(FiniteRep::new(g, Some(c))?))
            }
            RepRingSpec::Product { factors } => {
                let parts: Vec<RepRing> = factors.iter().map(RepRing::from_spec).collect::<Result<_>>()?;
                if parts.iter().all(|p| matches!(p, RepRing::Reductive(_))) {
                    RepRing::Reductive(Reductive::Product(
                        parts.into_iter().map(|p| if let RepRing::Reductive(r) = p { r } else { unreachable!() }).collect(),
                    ))
                } else if factors.iter().all(|f| matches!(f, RepRingSpec::Finite { .. })) {
                    let group = GroupSpec::Product(
                        factors.iter().map(|f| if let RepRingSpec::Finite { group } = f { group.clone() } else { unreachable!() }).collect(),
                    );
                    RepRing::Finite(Arc::new(FiniteRep::new(group.build()?, None)?))
                } else {
                    return Err(Error::Config("products must be all connected or all untwisted finite".into()));
                }
            }
        };
        if let RepRing::Reductive(g) = &r {
            g.validate()?;
        }
        Ok(r)
    }

    pub fn is_connected(&self) -> bool {
        matches!(self, RepRing::Reductive(_))
    }

    pub fn modulus(&self) -> u32 {
        match self {
            RepRing::Reductive(g) => g.modulus(),
            RepRing::Finite(f) => f.modulus(),
        }
    }

    /// Irreducibles of the given degree, up to `bound` for connected groups.
    pub fn irreps(&self, bound: u64, degree: u32) -> Result<Vec<Irrep>> {
        match self {
            RepRing::Reductive(g) => Ok(g
                .labels(bound)
                .into_iter()
                .filter(|l| g.degree(l) == degree % g.modulus())
                .map(|l| Irrep { dim: g.dim(&l), label: l })
                .collect()),
            RepRing::Finite(f) => {
                let t = f.full_table()?;
                Ok(f.sector(&t, degree)?
                    .into_iter()
                    .map(|i| Irrep { label: vec![i as i64, (degree % f.modulus()) as i64], dim: t.dim(i) })
                    .collect())
            }
        }
    }

    pub fn trivial(&self) -> Irrep {
        match self {
            RepRing::Reductive(g) => Irrep { label: g.trivial(), dim: 1 },
            RepRing::Finite(_) => Irrep { label: vec![0, 0], dim: 1 },
        }
    }

    pub fn degree(&self, v: &Irrep) -> u32 {
        match self {
            RepRing::Reductive(g) => g.degree(&v.label),
            RepRing::Finite(_) => v.label[1] as u32,
        }
    }

    fn check(&self, v: &Irrep) -> Result<()> {
        let ok = match self {
            RepRing::Reductive(g) => g.is_label(&v.label) && g.dim(&v.label) == v.dim,
            RepRing::Finite(f) => {
                let t = f.full_table()?;
                v.label.len() == 2
                    && (0..t.len() as i64).contains(&v.label[0])
                    && t.dim(v.label[0] as usize) == v.dim
                    && f.degree(&t, v.label[0] as usize)? as i64 == v.label[1]
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Rep(format!("{:?} is not an irreducible of this ring", v.label)))
        }
    }

    /// Decomposition of `V ⊗ W`. Degrees add; for extensions of order above
    /// 2 only products landing in degree 0 or 1 are exposed.
    pub fn tensor_decompose(&self, v: &Irrep, w: &Irrep) -> Result<Vec<(Irrep, u64)>> {
        self.check(v)?;
        self.check(w)?;
        let n = self.modulus();
        let degree = (self.degree(v) + self.degree(w)) % n;
        if n > 2 && degree > 1 {
            return Err(Error::CocycleDegree(format!("product lands in degree {degree}")));
        }
        match self {
            RepRing::Reductive(g) => Ok(g
                .tensor(&v.label, &w.label)
                .into_iter()
                .map(|(l, m)| (Irrep { dim: g.dim(&l), label: l }, m))
                .collect()),
            RepRing::Finite(f) => {
                let t = f.full_table()?;
                let (a, b) = (t.character(v.label[0] as usize), t.character(w.label[0] as usize));
                let prod: Vec<u64> = a.iter().zip(b).map(|(&x, &y)| f.field().mul(x, y)).collect();
                let mults = t.decompose(f.group(), &prod)?;
                let mut out = Vec::new();
                for (i, m) in mults.into_iter().enumerate() {
                    if m > 0 {
                        out.push((Irrep { label: vec![i as i64, degree as i64], dim: t.dim(i) }, m));
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn dual(&self, v: &Irrep) -> Result<Irrep> {
        self.check(v)?;
        match self {
            RepRing::Reductive(g) => Ok(Irrep { label: g.dual(&v.label), dim: v.dim }),
            RepRing::Finite(f) => {
                let t = f.full_table()?;
                let g = f.group();
                let chi = t.character(v.label[0] as usize);
                let dual: Vec<u64> = t.elements().iter().map(|&x| chi[t.position(g.inv(x)).unwrap()]).collect();
                let i = (0..t.len()).find(|&i| t.character(i) == dual.as_slice()).expect("dual is irreducible");
                let n = f.modulus() as i64;
                Ok(Irrep { label: vec![i as i64, (n - v.label[1]) % n], dim: v.dim })
            }
        }
    }

    /// Restriction of an irreducible of `F` (untwisted finite rings only)
    /// to the subgroup generated by `sub`; multiplicities in its table.
    pub fn restrict(&self, v: &Irrep, sub: &[usize]) -> Result<Vec<u64>> {
        let f = self.finite()?;
        let all: Vec<usize> = (0..f.group().order()).collect();
        f.restrict(&all, v.label[0] as usize, &f.group().generated(sub))
    }

    /// Induction of the `irrep`-th irreducible of the subgroup generated by
    /// `sub`; multiplicities in the table of the whole group.
    pub fn induce(&self, sub: &[usize], irrep: usize) -> Result<Vec<u64>> {
        let f = self.finite()?;
        let all: Vec<usize> = (0..f.group().order()).collect();
        f.induce(&f.group().generated(sub), irrep, &all)
    }

    pub fn finite(&self) -> Result<&Arc<FiniteRep>> {
        match self {
            RepRing::Finite(f) => Ok(f),
            RepRing::Reductive(_) => Err(Error::Rep("induction and restriction need a finite group".into())),
        }
    }

    /// Multiplicity table of all products of the given irreducibles.
    pub fn fusion_table(&self, irreps: &[Irrep]) -> Result<BTreeMap<(usize, usize), Vec<(Irrep, u64)>>> {
        let mut out = BTreeMap::new();
        for (i, a) in irreps.iter().enumerate() {
            for (j, b) in irreps.iter().enumerate() {
                out.insert((i, j), self.tensor_decompose(a, b)?);
            }
        }
        Ok(out)
    }
}
