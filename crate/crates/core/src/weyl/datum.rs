use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest lattice rank handled (GL3).
pub const MAX_RANK: usize = 3;

/// A vector in the weight lattice `X` (or its dual), padded with zeros
/// beyond the lattice rank.
pub type Weight = [i64; MAX_RANK];

type Mat = [[i64; MAX_RANK]; MAX_RANK];

/// Convention id carried by every cache key and artifact.
pub const CONVENTION_ID: &str = "soergel-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    A1,
    A2,
    B2,
    C2,
    G2,
    A1xA1,
    Gl(u8),
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::A1 => write!(f, "A1"),
            TypeLabel::A2 => write!(f, "A2"),
            TypeLabel::B2 => write!(f, "B2"),
            TypeLabel::C2 => write!(f, "C2"),
            TypeLabel::G2 => write!(f, "G2"),
            TypeLabel::A1xA1 => write!(f, "A1xA1"),
            TypeLabel::Gl(n) => write!(f, "GL{n}"),
        }
    }
}

impl FromStr for TypeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase().replace('×', "X");
        Ok(match up.as_str() {
            "A1" => TypeLabel::A1,
            "A2" => TypeLabel::A2,
            "B2" => TypeLabel::B2,
            "C2" => TypeLabel::C2,
            "G2" => TypeLabel::G2,
            "A1XA1" => TypeLabel::A1xA1,
            "GL2" => TypeLabel::Gl(2),
            "GL3" => TypeLabel::Gl(3),
            _ => return Err(Error::UnsupportedDatum(s.to_string())),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LatticeChoice {
    SimplyConnected,
    Adjoint,
    Gl,
}

impl fmt::Display for LatticeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeChoice::SimplyConnected => "sc",
            LatticeChoice::Adjoint => "ad",
            LatticeChoice::Gl => "gl",
        })
    }
}

impl FromStr for LatticeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sc" | "simply_connected" => Ok(LatticeChoice::SimplyConnected),
            "ad" | "adj" | "adjoint" => Ok(LatticeChoice::Adjoint),
            "gl" => Ok(LatticeChoice::Gl),
            _ => Err(Error::UnsupportedDatum(s.to_string())),
        }
    }
}

/// A positive root together with its coroot. `coeffs` are the coordinates
/// in the basis of simple roots, `co_coeffs` those of the coroot in the
/// basis of simple coroots.
#[derive(Clone, Debug)]
pub struct Root {
    pub root: Weight,
    pub coroot: Weight,
    pub coeffs: Vec<i64>,
    pub co_coeffs: Vec<i64>,
}

/// Element of the extended affine Weyl group, stored in the normal form
/// `(w, λ)` meaning `w · t_λ`, so that
/// `(w, λ)(w', λ') = (ww', w'⁻¹(λ) + λ')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylElement {
    pub(crate) fin: u16,
    pub(crate) trans: Weight,
    pub(crate) tag: u16,
}

impl WeylElement {
    /// Index of the finite part in the datum's enumeration of `W_f`.
    pub fn finite_index(&self) -> usize {
        self.fin as usize
    }

    pub fn translation(&self) -> Weight {
        self.trans
    }
}

/// The finite Weyl group, enumerated by BFS with shortlex reduced words.
#[derive(Clone, Debug)]
pub struct FiniteWeyl {
    mats: Vec<Mat>,
    mult: Vec<Vec<u16>>,
    inv: Vec<u16>,
    words: Vec<Vec<u8>>,
    simple: Vec<u16>,
    // flips[w][k] is true when w⁻¹ sends the k-th positive root to a negative one
    flips: Vec<Vec<bool>>,
}

impl FiniteWeyl {
    pub fn order(&self) -> usize {
        self.mats.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    /// Reduced word in the finite simple reflections (0-based root indices).
    pub fn word(&self, a: usize) -> &[u8] {
        &self.words[a]
    }

    pub fn length(&self, a: usize) -> usize {
        self.words[a].len()
    }

    pub fn simple(&self, i: usize) -> usize {
        self.simple[i] as usize
    }

    fn act(&self, a: usize, v: &Weight) -> Weight {
        mat_vec(&self.mats[a], v)
    }
}

/// A root datum of one of the supported low-rank types together with the
/// derived affine data: simple affine reflections `S`, the length-zero
/// subgroup `Ω` and its conjugation action on `S`.
#[derive(Clone, Debug)]
pub struct RootDatum {
    label: TypeLabel,
    lattice: LatticeChoice,
    tag: u16,
    rank: usize,
    lattice_rank: usize,
    cartan: Vec<Vec<i64>>,
    simple_roots: Vec<Weight>,
    simple_coroots: Vec<Weight>,
    positive_roots: Vec<Root>,
    weyl: FiniteWeyl,
    gens: Vec<WeylElement>,
    affine_gens: Vec<usize>,
    omega: Option<Vec<WeylElement>>,
    // generator of Ω ≅ ℤ for GL data
    omega_gen: Option<WeylElement>,
    omega_conj: Vec<Vec<usize>>,
    omega_invariants: Vec<u64>,
}

fn cartan_for(label: TypeLabel) -> Vec<Vec<i64>> {
    // a[i][j] = <α̌_i, α_j>
    match label {
        TypeLabel::A1 => vec![vec![2]],
        TypeLabel::A2 => vec![vec![2, -1], vec![-1, 2]],
        TypeLabel::B2 => vec![vec![2, -1], vec![-2, 2]],
        TypeLabel::C2 => vec![vec![2, -2], vec![-1, 2]],
        TypeLabel::G2 => vec![vec![2, -3], vec![-1, 2]],
        TypeLabel::A1xA1 => vec![vec![2, 0], vec![0, 2]],
        TypeLabel::Gl(n) => {
            let r = n as usize - 1;
            (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| match (i as i64 - j as i64).abs() {
                            0 => 2,
                            1 => -1,
                            _ => 0,
                        })
                        .collect()
                })
                .collect()
        }
    }
}

fn dot(a: &Weight, b: &Weight) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &Mat, v: &Weight) -> Weight {
    let mut out = [0; MAX_RANK];
    for (i, row) in m.iter().enumerate() {
        out[i] = dot(row, v);
    }
    out
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[0; MAX_RANK]; MAX_RANK];
    for i in 0..MAX_RANK {
        for j in 0..MAX_RANK {
            out[i][j] = (0..MAX_RANK).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn identity_mat(n: usize) -> Mat {
    let mut m = [[0; MAX_RANK]; MAX_RANK];
    for (i, row) in m.iter_mut().enumerate().take(n) {
        row[i] = 1;
    }
    m
}

/// Matrix of the reflection λ ↦ λ − ⟨λ, β̌⟩ β on X.
fn reflection_mat(root: &Weight, coroot: &Weight, n: usize) -> Mat {
    let mut m = identity_mat(n);
    for i in 0..n {
        for j in 0..n {
            m[i][j] -= root[i] * coroot[j];
        }
    }
    m
}

/// Invariant factors (> 1) of the cokernel of an integer matrix, by Smith
/// normal form. Small matrices only.
fn invariant_factors(mut m: Vec<Vec<i64>>) -> Vec<u64> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t] / m[t][t];
            for j in t..cols {
                m[i][j] -= q * m[t][j];
            }
            if m[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = m[t][j] / m[t][t];
            for i in t..rows {
                m[i][j] -= q * m[i][t];
            }
            if m[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility condition
        let p = m[t][t];
        let mut fixed = false;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if m[i][j] % p != 0 {
                    for k in t..cols {
                        let v = m[i][k];
                        m[t][k] += v;
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        diag.push(p.unsigned_abs());
        t += 1;
    }
    let mut out: Vec<u64> = diag.into_iter().filter(|&d| d > 1).collect();
    out.sort_unstable();
    out
}

impl RootDatum {
    /// Builds the datum for `label` with the given lattice choice. Positive
    /// roots are obtained by closing the simple roots under the simple
    /// reflections.
    pub fn new(label: TypeLabel, lattice: LatticeChoice) -> Result<Self> {
        let is_gl = matches!(label, TypeLabel::Gl(_));
        if is_gl != (lattice == LatticeChoice::Gl) {
            return Err(Error::IncompatibleLattice { label: label.to_string(), lattice: lattice.to_string() });
        }
        if let TypeLabel::Gl(n) = label {
            if !(2..=3).contains(&n) {
                return Err(Error::UnsupportedDatum(label.to_string()));
            }
        }
        let cartan = cartan_for(label);
        let rank = cartan.len();
        let (lattice_rank, simple_roots, simple_coroots) = match (label, lattice) {
            (TypeLabel::Gl(n), _) => {
                let n = n as usize;
                let roots: Vec<Weight> = (0..n - 1)
                    .map(|i| {
                        let mut v = [0; MAX_RANK];
                        v[i] = 1;
                        v[i + 1] = -1;
                        v
                    })
                    .collect();
                (n, roots.clone(), roots)
            }
            (_, LatticeChoice::SimplyConnected) => {
                let roots = (0..rank)
                    .map(|j| {
                        let mut v = [0; MAX_RANK];
                        for (i, row) in cartan.iter().enumerate() {
                            v[i] = row[j];
                        }
                        v
                    })
                    .collect();
                let coroots = (0..rank)
                    .map(|i| {
                        let mut v = [0; MAX_RANK];
                        v[i] = 1;
                        v
                    })
                    .collect();
                (rank, roots, coroots)
            }
            (_, LatticeChoice::Adjoint) => {
                let roots = (0..rank)
                    .map(|j| {
                        let mut v = [0; MAX_RANK];
                        v[j] = 1;
                        v
                    })
                    .collect();
                let coroots = (0..rank)
                    .map(|i| {
                        let mut v = [0; MAX_RANK];
                        v[..rank].copy_from_slice(&cartan[i][..rank]);
                        v
                    })
                    .collect();
                (rank, roots, coroots)
            }
            (_, LatticeChoice::Gl) => unreachable!(),
        };
        for i in 0..rank {
            for j in 0..rank {
                debug_assert_eq!(dot(&simple_coroots[i], &simple_roots[j]), cartan[i][j]);
            }
        }

        let positive_roots = close_roots(&cartan, &simple_roots, &simple_coroots);
        let weyl = build_finite_weyl(rank, lattice_rank, &simple_roots, &simple_coroots, &positive_roots);
        let tag = datum_tag(label, lattice);

        let mut datum = RootDatum {
            label,
            lattice,
            tag,
            rank,
            lattice_rank,
            cartan,
            simple_roots,
            simple_coroots,
            positive_roots,
            weyl,
            gens: Vec::new(),
            affine_gens: Vec::new(),
            omega: None,
            omega_gen: None,
            omega_conj: Vec::new(),
            omega_invariants: Vec::new(),
        };
        datum.build_generators()?;
        datum.build_omega()?;
        Ok(datum)
    }

    /// Parses strings like `"A2:sc"`, `"A1xA1:ad"` or `"GL3"`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (label, lattice) = match spec.split_once(':') {
            Some((l, c)) => (l.parse::<TypeLabel>()?, c.parse::<LatticeChoice>()?),
            None => {
                let l = spec.parse::<TypeLabel>()?;
                let c = if matches!(l, TypeLabel::Gl(_)) { LatticeChoice::Gl } else { LatticeChoice::SimplyConnected };
                (l, c)
            }
        };
        RootDatum::new(label, lattice)
    }

    /// Canonical string form, e.g. `A2:sc`.
    pub fn spec_string(&self) -> String {
        format!("{}:{}", self.label, self.lattice)
    }

    fn build_generators(&mut self) -> Result<()> {
        // components of the Dynkin diagram
        let r = self.rank;
        let mut comp = vec![usize::MAX; r];
        let mut ncomp = 0;
        for start in 0..r {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = ncomp;
            while let Some(i) = stack.pop() {
                for j in 0..r {
                    if self.cartan[i][j] != 0 && comp[j] == usize::MAX {
                        comp[j] = ncomp;
                        stack.push(j);
                    }
                }
            }
            ncomp += 1;
        }
        let e = self.identity();
        let finite: Vec<WeylElement> =
            (0..r).map(|i| WeylElement { fin: self.weyl.simple[i], trans: [0; MAX_RANK], tag: self.tag }).collect();
        let mut affine = Vec::new();
        for c in 0..ncomp {
            // θ: the root whose coroot is the highest coroot of the component;
            // s0 is the reflection in the wall ⟨·, θ̌⟩ = 1 of the fundamental alcove
            let theta = self
                .positive_roots
                .iter()
                .filter(|rt| rt.coeffs.iter().enumerate().all(|(i, &k)| k == 0 || comp[i] == c))
                .max_by_key(|rt| rt.co_coeffs.iter().sum::<i64>())
                .expect("component has roots");
            let m = reflection_mat(&theta.root, &theta.coroot, self.lattice_rank);
            let fin = self
                .weyl
                .mats
                .iter()
                .position(|x| *x == m)
                .ok_or_else(|| Error::Invariant("highest-root reflection not in W_f".into()))?;
            let mut trans = [0; MAX_RANK];
            for (t, x) in trans.iter_mut().zip(theta.root.iter()) {
                *t = -x;
            }
            affine.push(WeylElement { fin: fin as u16, trans, tag: self.tag });
        }
        let mut gens = vec![affine[0]];
        gens.extend(finite);
        let mut affine_gens = vec![0];
        for a in affine.into_iter().skip(1) {
            affine_gens.push(gens.len());
            gens.push(a);
        }
        for g in &gens {
            if self.length(g) != 1 || self.mul(g, g) != e {
                return Err(Error::Invariant(format!("generator {g:?} is not a simple reflection")));
            }
        }
        self.gens = gens;
        self.affine_gens = affine_gens;
        Ok(())
    }

    fn build_omega(&mut self) -> Result<()> {
        if self.lattice == LatticeChoice::Gl {
            self.omega = None;
            self.omega_invariants = vec![0];
            let n = self.lattice_rank;
            let mut gen = None;
            for code in 0..3usize.pow(n as u32) {
                let mut lam = [0i64; MAX_RANK];
                let mut c = code;
                for l in lam.iter_mut().take(n) {
                    *l = (c % 3) as i64 - 1;
                    c /= 3;
                }
                if lam.iter().sum::<i64>() != 1 {
                    continue;
                }
                for w in 0..self.weyl.order() {
                    let x = WeylElement { fin: w as u16, trans: lam, tag: self.tag };
                    if self.length(&x) == 0 {
                        gen = Some(x);
                    }
                }
            }
            let gen = gen.ok_or_else(|| Error::Invariant("no length-zero generator for GL".into()))?;
            let gi = self.inverse(&gen);
            let perm = self
                .gens
                .iter()
                .map(|s| {
                    let c = self.mul(&self.mul(&gen, s), &gi);
                    self.gens.iter().position(|g| *g == c)
                })
                .collect::<Option<Vec<usize>>>()
                .ok_or_else(|| Error::Invariant("Ω does not normalise S".into()))?;
            self.omega_gen = Some(gen);
            self.omega_conj = vec![perm];
            return Ok(());
        }
        let m: Vec<Vec<i64>> =
            (0..self.lattice_rank).map(|i| self.simple_roots.iter().map(|a| a[i]).collect()).collect();
        self.omega_invariants = invariant_factors(m);
        let expected: u64 = self.omega_invariants.iter().product();

        let r = self.lattice_rank;
        let mut found = Vec::new();
        let range = -2i64..=2;
        let mut lam = [0i64; MAX_RANK];
        let total = 5usize.pow(r as u32);
        for code in 0..total {
            let mut c = code;
            for l in lam.iter_mut().take(r) {
                *l = (c % 5) as i64 + range.start();
                c /= 5;
            }
            for w in 0..self.weyl.order() {
                let x = WeylElement { fin: w as u16, trans: lam, tag: self.tag };
                if self.length(&x) == 0 {
                    found.push(x);
                }
            }
        }
        found.sort();
        found.dedup();
        if found.len() as u64 != expected {
            return Err(Error::Invariant(format!(
                "found {} length-zero elements, expected |X/Q| = {expected}",
                found.len()
            )));
        }
        let mut conj = Vec::new();
        for om in &found {
            let oi = self.inverse(om);
            let mut perm = Vec::new();
            for s in &self.gens {
                let c = self.mul(&self.mul(om, s), &oi);
                let k = self
                    .gens
                    .iter()
                    .position(|g| *g == c)
                    .ok_or_else(|| Error::Invariant("Ω does not normalise S".into()))?;
                perm.push(k);
            }
            conj.push(perm);
        }
        self.omega = Some(found);
        self.omega_conj = conj;
        Ok(())
    }

    pub fn label(&self) -> TypeLabel {
        self.label
    }

    pub fn lattice(&self) -> LatticeChoice {
        self.lattice
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn simple_roots(&self) -> &[Weight] {
        &self.simple_roots
    }

    pub fn simple_coroots(&self) -> &[Weight] {
        &self.simple_coroots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive_roots
    }

    pub fn finite_weyl(&self) -> &FiniteWeyl {
        &self.weyl
    }

    /// The simple affine reflections `S`; index `i` is named `s{i}`.
    pub fn generators(&self) -> &[WeylElement] {
        &self.gens
    }

    /// Indices into [`generators`](Self::generators) of the affine
    /// (non-finite) reflections, one per irreducible component.
    pub fn affine_generators(&self) -> &[usize] {
        &self.affine_gens
    }

    /// Index of the finite simple reflection `s_i` (0-based root index)
    /// among the generators.
    pub fn finite_generator(&self, i: usize) -> usize {
        i + 1
    }

    /// The length-zero subgroup, identity first; `None` when it is infinite.
    pub fn omega(&self) -> Option<&[WeylElement]> {
        self.omega.as_deref()
    }

    /// Invariant factors of `Ω ≅ X/Q`; `[0]` denotes ℤ.
    pub fn omega_invariants(&self) -> &[u64] {
        &self.omega_invariants
    }

    /// `omega_conjugation(k)[i] = j` when `ω_k s_i ω_k⁻¹ = s_j`. For GL data
    /// `k` is the exponent of the generator of `Ω ≅ ℤ`.
    pub fn omega_conjugation(&self, k: i64) -> Vec<usize> {
        match &self.omega {
            Some(_) => self.omega_conj[k as usize].clone(),
            None => {
                let p = &self.omega_conj[0];
                let n = p.len();
                let mut out: Vec<usize> = (0..n).collect();
                let steps = k.rem_euclid(n.max(1) as i64);
                for _ in 0..steps {
                    out = out.iter().map(|&i| p[i]).collect();
                }
                out
            }
        }
    }

    /// The Ω element with code `k` (an index into [`omega`](Self::omega), or
    /// an exponent of the generator for GL data).
    pub fn omega_element(&self, k: i64) -> WeylElement {
        match (&self.omega, &self.omega_gen) {
            (Some(om), _) => om[k as usize],
            (None, Some(g)) => {
                let base = if k >= 0 { *g } else { self.inverse(g) };
                (0..k.unsigned_abs()).fold(self.identity(), |acc, _| self.mul(&acc, &base))
            }
            (None, None) => unreachable!("datum without Ω data"),
        }
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement { fin: 0, trans: [0; MAX_RANK], tag: self.tag }
    }

    pub fn translation(&self, lambda: Weight) -> WeylElement {
        WeylElement { fin: 0, trans: lambda, tag: self.tag }
    }

    /// Element of the finite Weyl group by index.
    pub fn finite_element(&self, w: usize) -> WeylElement {
        WeylElement { fin: w as u16, trans: [0; MAX_RANK], tag: self.tag }
    }

    pub fn owns(&self, x: &WeylElement) -> bool {
        x.tag == self.tag
    }

    /// Group product; fails on elements of another datum.
    pub fn multiply(&self, x: &WeylElement, y: &WeylElement) -> Result<WeylElement> {
        if x.tag != self.tag || y.tag != self.tag {
            return Err(Error::MixedDatum);
        }
        Ok(self.mul(x, y))
    }

    pub(crate) fn mul(&self, x: &WeylElement, y: &WeylElement) -> WeylElement {
        let yinv = self.weyl.inverse(y.fin as usize);
        let moved = self.weyl.act(yinv, &x.trans);
        let mut trans = [0; MAX_RANK];
        for i in 0..MAX_RANK {
            trans[i] = moved[i] + y.trans[i];
        }
        WeylElement { fin: self.weyl.mul(x.fin as usize, y.fin as usize) as u16, trans, tag: self.tag }
    }

    pub fn inverse(&self, x: &WeylElement) -> WeylElement {
        let moved = self.weyl.act(x.fin as usize, &x.trans);
        let mut trans = [0; MAX_RANK];
        for i in 0..MAX_RANK {
            trans[i] = -moved[i];
        }
        WeylElement { fin: self.weyl.inverse(x.fin as usize) as u16, trans, tag: self.tag }
    }

    /// Iwahori–Matsumoto length: the number of affine root hyperplanes
    /// separating the fundamental alcove from its image.
    pub fn length(&self, x: &WeylElement) -> usize {
        let w = x.fin as usize;
        let wl = self.weyl.act(w, &x.trans);
        let mut total = 0i64;
        for (k, rt) in self.positive_roots.iter().enumerate() {
            let n = dot(&wl, &rt.coroot);
            total += if self.weyl.flips[w][k] { (n - 1).abs() } else { n.abs() };
        }
        total as usize
    }

    /// True when the translation part lies in the root lattice, i.e. the
    /// element belongs to the (unextended) affine Weyl group `W`.
    pub fn in_affine_weyl(&self, x: &WeylElement) -> bool {
        self.in_root_lattice(&x.trans)
    }

    fn in_root_lattice(&self, lam: &Weight) -> bool {
        match self.lattice {
            LatticeChoice::Gl => lam.iter().sum::<i64>() == 0,
            LatticeChoice::Adjoint => true,
            LatticeChoice::SimplyConnected => {
                // solve A c = λ over ℚ by Cramer's rule
                let r = self.rank;
                let a: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| self.simple_roots[j][i]).collect()).collect();
                let d = det(&a);
                (0..r).all(|col| {
                    let mut b = a.clone();
                    for (i, row) in b.iter_mut().enumerate() {
                        row[col] = lam[i];
                    }
                    det(&b) % d == 0
                })
            }
        }
    }

    /// Code of the Ω-component of `x`: the `k` with `ω_k⁻¹ x ∈ W`.
    pub fn omega_code(&self, x: &WeylElement) -> i64 {
        match &self.omega {
            Some(omega) => omega
                .iter()
                .position(|om| self.in_affine_weyl(&self.mul(&self.inverse(om), x)))
                .expect("Ω covers X/Q") as i64,
            None => x.trans.iter().sum(),
        }
    }

    /// Left descent by generator `i`: `ℓ(s_i x) < ℓ(x)`.
    pub fn is_left_descent(&self, i: usize, x: &WeylElement) -> bool {
        self.length(&self.mul(&self.gens[i], x)) < self.length(x)
    }

    pub fn is_right_descent(&self, x: &WeylElement, i: usize) -> bool {
        self.length(&self.mul(x, &self.gens[i])) < self.length(x)
    }

    /// Canonical reduced expression `x = ω_k · s_{i1} ⋯ s_{in}` with the
    /// lexicographically smallest left descent peeled first. Returns the
    /// Ω index (0 when Ω is infinite and the element lies in `W`).
    pub fn reduced_word(&self, x: &WeylElement) -> (i64, Vec<u8>) {
        let mut word = Vec::new();
        let mut cur = *x;
        loop {
            let l = self.length(&cur);
            if l == 0 {
                break;
            }
            let i = (0..self.gens.len())
                .find(|&i| self.length(&self.mul(&self.gens[i], &cur)) < l)
                .expect("nonzero length has a descent");
            word.push(i as u8);
            cur = self.mul(&self.gens[i], &cur);
        }
        // cur is now the length-zero part ω with x = s_{i1}⋯s_{in} ω; move ω
        // to the front by conjugation.
        let k = self.omega_code(&cur);
        debug_assert_eq!(self.omega_element(k), cur);
        if k != 0 {
            let inv_perm: Vec<usize> = {
                let p = self.omega_conjugation(k);
                let mut q = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    q[j] = i;
                }
                q
            };
            // s ω = ω (ω⁻¹ s ω)
            for s in word.iter_mut() {
                *s = inv_perm[*s as usize] as u8;
            }
        }
        (k, word)
    }

    pub fn word_string(&self, x: &WeylElement) -> String {
        let (k, word) = self.reduced_word(x);
        let mut s = String::new();
        if k != 0 {
            s.push_str(&format!("p{k}"));
        }
        for i in word {
            s.push_str(&format!("s{i}"));
        }
        if s.is_empty() {
            s.push('e');
        }
        s
    }

    /// Parses a word such as `s0s1s0`, `p1s0` or `e` into an element.
    pub fn parse_word(&self, text: &str) -> Result<WeylElement> {
        let t = text.trim();
        let mut x = self.identity();
        if t == "e" || t.is_empty() {
            return Ok(x);
        }
        let bytes = t.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let kind = bytes[pos];
            pos += 1;
            let start = pos;
            if kind == b'p' && pos < bytes.len() && bytes[pos] == b'-' {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let idx: i64 = t[start..pos].parse().map_err(|_| Error::BadWord(text.to_string()))?;
            let bad = || Error::BadWord(text.to_string());
            let g = match kind {
                b's' => *usize::try_from(idx).ok().and_then(|i| self.gens.get(i)).ok_or_else(bad)?,
                b'p' => match &self.omega {
                    Some(o) => *usize::try_from(idx).ok().and_then(|i| o.get(i)).ok_or_else(bad)?,
                    None => self.omega_element(idx),
                },
                _ => return Err(Error::BadWord(text.to_string())),
            };
            x = self.mul(&x, &g);
        }
        Ok(x)
    }

    /// Reduced word of the finite part in finite simple reflections.
    pub fn finite_word(&self, x: &WeylElement) -> Vec<u8> {
        self.weyl.word(x.fin as usize).to_vec()
    }

    /// The unique shortest element of the coset `x·W_f`.
    pub fn min_coset_rep(&self, x: &WeylElement) -> WeylElement {
        (0..self.weyl.order())
            .map(|u| self.mul(x, &self.finite_element(u)))
            .min_by_key(|y| (self.length(y), *y))
            .expect("W_f is nonempty")
    }

    pub fn is_min_coset_rep(&self, x: &WeylElement) -> bool {
        (1..=self.rank).all(|i| !self.is_right_descent(x, i))
    }

    /// Bruhat order via the lifting property along a reduced word of `y`.
    /// Elements in different Ω-components are incomparable (false).
    pub fn bruhat_leq(&self, x: &WeylElement, y: &WeylElement) -> bool {
        let kx = self.omega_code(x);
        if kx != self.omega_code(y) {
            return false;
        }
        let oi = self.inverse(&self.omega_element(kx));
        let (mut a, mut b) = (self.mul(&oi, x), self.mul(&oi, y));
        let mut lb = self.length(&b);
        let mut la = self.length(&a);
        while lb > 0 {
            if la > lb {
                return false;
            }
            let i = (0..self.gens.len()).find(|&i| self.is_right_descent(&b, i)).expect("descent");
            b = self.mul(&b, &self.gens[i]);
            lb -= 1;
            let as_ = self.mul(&a, &self.gens[i]);
            let las = self.length(&as_);
            if las < la {
                a = as_;
                la = las;
            }
        }
        la == 0 && a == b
    }
}

fn det(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        0 => 1,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    a[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn datum_tag(label: TypeLabel, lattice: LatticeChoice) -> u16 {
    let l = match label {
        TypeLabel::A1 => 1,
        TypeLabel::A2 => 2,
        TypeLabel::B2 => 3,
        TypeLabel::C2 => 4,
        TypeLabel::G2 => 5,
        TypeLabel::A1xA1 => 6,
        TypeLabel::Gl(n) => 10 + n as u16,
    };
    let c = match lattice {
        LatticeChoice::SimplyConnected => 0,
        LatticeChoice::Adjoint => 1,
        LatticeChoice::Gl => 2,
    };
    l * 4 + c
}

fn close_roots(cartan: &[Vec<i64>], simple_roots: &[Weight], simple_coroots: &[Weight]) -> Vec<Root> {
    let r = cartan.len();
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut all: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        seen.insert(e.clone(), all.len());
        all.push((e.clone(), e.clone()));
        queue.push_back(all.len() - 1);
    }
    while let Some(idx) = queue.pop_front() {
        let (n, m) = all[idx].clone();
        for j in 0..r {
            // ⟨β, α̌_j⟩ and ⟨α_j, β̌⟩
            let p: i64 = (0..r).map(|i| n[i] * cartan[j][i]).sum();
            let q: i64 = (0..r).map(|i| m[i] * cartan[i][j]).sum();
            let mut n2 = n.clone();
            n2[j] -= p;
            let mut m2 = m.clone();
            m2[j] -= q;
            if !seen.contains_key(&n2) {
                seen.insert(n2.clone(), all.len());
                all.push((n2, m2));
                queue.push_back(all.len() - 1);
            }
        }
    }
    let mut pos: Vec<Root> = all
        .into_iter()
        .filter(|(n, _)| n.iter().all(|&c| c >= 0))
        .map(|(n, m)| {
            let mut root = [0; MAX_RANK];
            let mut coroot = [0; MAX_RANK];
            for i in 0..r {
                for k in 0..MAX_RANK {
                    root[k] += n[i] * simple_roots[i][k];
                    coroot[k] += m[i] * simple_coroots[i][k];
                }
            }
            Root { root, coroot, coeffs: n, co_coeffs: m }
        })
        .collect();
    pos.sort_by(|a, b| {
        let ha: i64 = a.coeffs.iter().sum();
        let hb: i64 = b.coeffs.iter().sum();
        (ha, &a.coeffs).cmp(&(hb, &b.coeffs))
    });
    pos
}

fn build_finite_weyl(
    rank: usize,
    lattice_rank: usize,
    simple_roots: &[Weight],
    simple_coroots: &[Weight],
    positive_roots: &[Root],
) -> FiniteWeyl {
    let gens: Vec<Mat> =
        (0..rank).map(|i| reflection_mat(&simple_roots[i], &simple_coroots[i], lattice_rank)).collect();
    let id = identity_mat(lattice_rank);
    let mut mats = vec![id];
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    let mut index: HashMap<Mat, usize> = HashMap::from([(id, 0)]);
    let mut head = 0;
    while head < mats.len() {
        let cur = mats[head];
        for (i, g) in gens.iter().enumerate() {
            let m = mat_mul(g, &cur);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(m) {
                e.insert(mats.len());
                let mut w = vec![i as u8];
                w.extend_from_slice(&words[head]);
                mats.push(m);
                words.push(w);
            }
        }
        head += 1;
    }
    let n = mats.len();
    let mult: Vec<Vec<u16>> =
        (0..n).map(|a| (0..n).map(|b| index[&mat_mul(&mats[a], &mats[b])] as u16).collect()).collect();
    let inv: Vec<u16> = (0..n).map(|a| (0..n).position(|b| mult[a][b] == 0).unwrap() as u16).collect();
    let simple = gens.iter().map(|g| index[g] as u16).collect();
    let root_index: HashMap<Weight, usize> = positive_roots.iter().enumerate().map(|(k, r)| (r.root, k)).collect();
    let flips = (0..n)
        .map(|w| {
            let wi = inv[w] as usize;
            positive_roots.iter().map(|r| !root_index.contains_key(&mat_vec(&mats[wi], &r.root))).collect()
        })
        .collect();
    FiniteWeyl { mats, mult, inv, words, simple, flips }
}
