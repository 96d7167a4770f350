use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Connected reductive groups described only by their fusion rules.
///
/// Labels are highest weights: `[m]` for SL2 and PGL2 (an SL2 weight; odd
/// `m` are the irreducibles of the SL2 cover on which the centre acts by
/// −1), `[a, b]` with `a ≥ b` for GL2, and a weight vector for a torus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reductive {
    Sl2,
    Pgl2,
    Gl2,
    Torus(usize),
    Product(Vec<Reductive>),
}

impl Reductive {
    pub fn arity(&self) -> usize {
        match self {
            Reductive::Sl2 | Reductive::Pgl2 => 1,
            Reductive::Gl2 => 2,
            Reductive::Torus(r) => *r,
            Reductive::Product(fs) => fs.iter().map(Reductive::arity).sum(),
        }
    }

    /// Order of the central extension carried by twisted points.
    pub fn modulus(&self) -> u32 {
        match self {
            Reductive::Pgl2 => 2,
            Reductive::Product(fs) => fs.iter().map(Reductive::modulus).max().unwrap_or(1),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Reductive::Torus(r) if *r > 2 => Err(Error::Config(format!("torus of rank {r} > 2"))),
            Reductive::Product(fs) => {
                if fs.iter().filter(|f| f.modulus() > 1).count() > 1 {
                    return Err(Error::Config("at most one factor of a product may carry a twist".into()));
                }
                fs.iter().try_for_each(Reductive::validate)
            }
            _ => Ok(()),
        }
    }

    pub fn is_label(&self, l: &[i64]) -> bool {
        if l.len() != self.arity() {
            return false;
        }
        match self {
            Reductive::Sl2 | Reductive::Pgl2 => l[0] >= 0,
            Reductive::Gl2 => l[0] >= l[1],
            Reductive::Torus(_) => true,
            Reductive::Product(fs) => self.split(l, fs).iter().zip(fs).all(|(p, f)| f.is_label(p)),
        }
    }

    fn split<'a>(&self, l: &'a [i64], fs: &[Reductive]) -> Vec<&'a [i64]> {
        let mut out = Vec::new();
        let mut at = 0;
        for f in fs {
            out.push(&l[at..at + f.arity()]);
            at += f.arity();
        }
        out
    }

    pub fn dim(&self, l: &[i64]) -> u64 {
        match self {
            Reductive::Sl2 | Reductive::Pgl2 => l[0] as u64 + 1,
            Reductive::Gl2 => (l[0] - l[1]) as u64 + 1,
            Reductive::Torus(_) => 1,
            Reductive::Product(fs) => self.split(l, fs).iter().zip(fs).map(|(p, f)| f.dim(p)).product(),
        }
    }

    /// Central-character degree of a label (always 0 without a twist).
    pub fn degree(&self, l: &[i64]) -> u32 {
        match self {
            Reductive::Pgl2 => (l[0] % 2) as u32,
            Reductive::Product(fs) => self.split(l, fs).iter().zip(fs).map(|(p, f)| f.degree(p)).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Size proxy used to truncate: the SL2 weight, `a − b` for GL2 plus
    /// `|b|`, and the L1 norm for tori.
    pub fn proxy(&self, l: &[i64]) -> u64 {
        match self {
            Reductive::Sl2 | Reductive::Pgl2 => l[0] as u64,
            Reductive::Gl2 => (l[0] - l[1]) as u64 + l[1].unsigned_abs(),
            Reductive::Torus(_) => l.iter().map(|x| x.unsigned_abs()).sum(),
            Reductive::Product(fs) => self.split(l, fs).iter().zip(fs).map(|(p, f)| f.proxy(p)).sum(),
        }
    }

    pub fn dual(&self, l: &[i64]) -> Vec<i64> {
        match self {
            Reductive::Sl2 | Reductive::Pgl2 => l.to_vec(),
            Reductive::Gl2 => vec![-l[1], -l[0]],
            Reductive::Torus(_) => l.iter().map(|x| -x).collect(),
            Reductive::Product(fs) => self.split(l, fs).iter().zip(fs).flat_map(|(p, f)| f.dual(p)).collect(),
        }
    }

    pub fn trivial(&self) -> Vec<i64> {
        vec![0; self.arity()]
    }

    /// All labels with proxy at most `bound`, sorted.
    pub fn labels(&self, bound: u64) -> Vec<Vec<i64>> {
        let b = bound as i64;
        let mut out: Vec<Vec<i64>> = match self {
            Reductive::Sl2 | Reductive::Pgl2 => (0..=b).map(|m| vec![m]).collect(),
            Reductive::Gl2 => {
                let mut v = Vec::new();
                for bb in -b..=b {
                    for a in bb..=bb + b {
                        v.push(vec![a, bb]);
                    }
                }
                v
            }
            Reductive::Torus(r) => {
                let mut v: Vec<Vec<i64>> = vec![vec![]];
                for _ in 0..*r {
                    v = v.into_iter().flat_map(|p| (-b..=b).map(move |x| [p.clone(), vec![x]].concat())).collect();
                }
                v
            }
            Reductive::Product(fs) => {
                let mut v: Vec<Vec<i64>> = vec![vec![]];
                for f in fs {
                    let ls = f.labels(bound);
                    v = v.into_iter().flat_map(|p| ls.iter().map(move |l| [p.clone(), l.clone()].concat())).collect();
                }
                v
            }
        };
        out.retain(|l| self.proxy(l) <= bound);
        out.sort_by_key(|l| (self.proxy(l), l.clone()));
        out
    }

    /// Decomposition of `V(a) ⊗ V(b)`.
    pub fn tensor(&self, a: &[i64], b: &[i64]) -> Vec<(Vec<i64>, u64)> {
        let mut out: Vec<(Vec<i64>, u64)> = match self {
            Reductive::Sl2 | Reductive::Pgl2 => {
                let (m, n) = (a[0], b[0]);
                ((m - n).abs()..=m + n).step_by(2).map(|k| (vec![k], 1)).collect()
            }
            Reductive::Gl2 => {
                let (da, db) = (a[0] - a[1], b[0] - b[1]);
                (0..=da.min(db)).map(|k| (vec![a[0] + b[0] - k, a[1] + b[1] + k], 1)).collect()
            }
            Reductive::Torus(_) => vec![(a.iter().zip(b).map(|(x, y)| x + y).collect(), 1)],
            Reductive::Product(fs) => {
                let (pa, pb) = (self.split(a, fs), self.split(b, fs));
                let mut acc: Vec<(Vec<i64>, u64)> = vec![(vec![], 1)];
                for (i, f) in fs.iter().enumerate() {
                    let t = f.tensor(pa[i], pb[i]);
                    acc = acc
                        .into_iter()
                        .flat_map(|(l, m)| t.iter().map(move |(l2, m2)| ([l.clone(), l2.clone()].concat(), m * m2)))
                        .collect();
                }
                acc
            }
        };
        out.sort();
        out
    }
}
