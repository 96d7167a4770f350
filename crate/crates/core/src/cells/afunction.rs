use serde::Serialize;

use super::{CellDecomposition, CellKind};
use crate::error::{Error, Result};
use crate::hecke::StructureTable;

/// Value of the a-function together with its stabilization flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AValue {
    pub value: usize,
    pub stabilized: bool,
}

/// `a_L(z) = max deg_{v⁻¹} h_{x,y,z}` over complete pairs, per element and
/// per two-sided cell. With `B` the table's completeness bound, a value is
/// stabilized when it agrees with the one obtained from pairs of total
/// length at most `B − 2`.
#[derive(Debug)]
pub struct AFunction {
    element: Vec<Option<AValue>>,
    cell: Vec<Option<AValue>>,
}

impl AFunction {
    pub fn compute(st: &StructureTable, cells: &CellDecomposition) -> Result<Self> {
        let ball = st.kl().ball();
        let n = ball.len();
        let bound = st.bound();
        let mut big: Vec<Option<usize>> = vec![None; n];
        let mut small: Vec<Option<usize>> = vec![None; n];
        for (x, y) in st.complete_pairs() {
            let inner = bound >= 2 && ball.length(x) + ball.length(y) <= bound - 2;
            for (z, h) in st.product(x, y).expect("complete") {
                let deg = (-h.min_degree().expect("nonzero")).max(0) as usize;
                big[*z] = Some(big[*z].map_or(deg, |a| a.max(deg)));
                if inner {
                    small[*z] = Some(small[*z].map_or(deg, |a| a.max(deg)));
                }
            }
        }
        for z in 0..n {
            let zi = ball.inverse(z);
            if big[z] != big[zi] || small[z] != small[zi] {
                return Err(Error::Invariant(format!("a({}) differs from a of its inverse", ball.word(z))));
            }
        }
        let element: Vec<Option<AValue>> = (0..n)
            .map(|z| big[z].map(|value| AValue { value, stabilized: small[z] == Some(value) }))
            .collect();
        let cell = cells
            .cells(CellKind::TwoSided)
            .iter()
            .map(|c| {
                let hi = c.members.iter().filter_map(|&z| big[z]).max()?;
                let lo = c.members.iter().filter_map(|&z| small[z]).max();
                Some(AValue { value: hi, stabilized: c.stabilized && lo == Some(hi) })
            })
            .collect();
        Ok(AFunction { element, cell })
    }

    /// Ball-local value at `z`; `None` when no complete pair produces `z`.
    pub fn element(&self, z: usize) -> Option<AValue> {
        self.element[z]
    }

    /// Value on a two-sided cell: the maximum over its members.
    pub fn cell(&self, two_sided: usize) -> Option<AValue> {
        self.cell[two_sided]
    }

    pub(super) fn demote_cell(&mut self, two_sided: usize) {
        if let Some(v) = self.cell[two_sided].as_mut() {
            v.stabilized = false;
        }
    }

    /// The cell value, refusing unstabilized cells.
    pub fn stable_cell_value(&self, two_sided: usize) -> Result<usize> {
        match self.cell[two_sided] {
            Some(AValue { value, stabilized: true }) => Ok(value),
            _ => Err(Error::Unstabilized(format!("a-function on two-sided cell {two_sided}"))),
        }
    }
}
