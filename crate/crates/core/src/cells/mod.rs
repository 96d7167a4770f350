//! Kazhdan–Lusztig cells of a length ball, the a-function, the
//! γ-constants and distinguished involutions.
//!
//! Everything here is computed on a finite ball, so boundary elements may
//! miss relations that exist in the whole group. Ball-local cells always
//! refine the true cells; each cell carries a stabilization flag obtained by
//! recomputing on the ball of radius `L − 2` and comparing the two
//! partitions away from the smaller ball's outer sphere.

mod afunction;
mod gamma;
mod preorder;

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hecke::{KlTable, StructureTable};
use crate::weyl::Ball;

pub use afunction::AFunction;
pub use gamma::GammaTable;
pub use preorder::{scc_labels, Preorders};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Left,
    Right,
    TwoSided,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub id: usize,
    pub kind: CellKind,
    pub members: Vec<usize>,
    pub stabilized: bool,
}

/// Left, right and two-sided cells of a ball.
#[derive(Debug)]
pub struct CellDecomposition {
    ball: Arc<Ball>,
    preorders: Preorders,
    labels: [Vec<usize>; 3],
    cells: [Vec<Cell>; 3],
}

/// Spheres of the cut ball excluded from the stabilization comparison.
/// Boundary fragments reach two spheres deep in C2.
pub const PROBE_DEPTH: usize = 4;

fn kind_index(kind: CellKind) -> usize {
    match kind {
        CellKind::Left => 0,
        CellKind::Right => 1,
        CellKind::TwoSided => 2,
    }
}

impl CellDecomposition {
    pub fn build(kl: &KlTable) -> Result<Self> {
        let ball = kl.ball().clone();
        let preorders = Preorders::build(kl);
        let radius = ball.radius();
        let n = ball.len();
        let graphs = [preorders.left.clone(), preorders.right.clone(), preorders.two_sided()];

        // the same graphs cut down to ball(L − 2), compared on ball(L − 4)
        let inner: Vec<bool> = (0..n).map(|x| radius >= 2 && ball.length(x) <= radius - 2).collect();
        let probe: Vec<bool> = (0..n).map(|x| radius >= PROBE_DEPTH && ball.length(x) <= radius - PROBE_DEPTH).collect();

        let mut labels: [Vec<usize>; 3] = Default::default();
        let mut cells: [Vec<Cell>; 3] = Default::default();
        for (k, kind) in [CellKind::Left, CellKind::Right, CellKind::TwoSided].into_iter().enumerate() {
            let full = scc_labels(&graphs[k]);
            let cut: Vec<Vec<usize>> = graphs[k]
                .iter()
                .enumerate()
                .map(|(x, outs)| if inner[x] { outs.iter().copied().filter(|&y| inner[y]).collect() } else { Vec::new() })
                .collect();
            let small = scc_labels(&cut);
            let count = full.iter().copied().max().map_or(0, |m| m + 1);
            let mut list: Vec<Cell> =
                (0..count).map(|id| Cell { id, kind, members: Vec::new(), stabilized: false }).collect();
            for x in 0..n {
                list[full[x]].members.push(x);
            }
            for cell in list.iter_mut() {
                let seen: Vec<usize> = cell.members.iter().copied().filter(|&x| probe[x]).collect();
                cell.stabilized = match seen.first() {
                    None => false,
                    Some(&x0) => {
                        let target = small[x0];
                        let agree_inside = seen.iter().all(|&x| small[x] == target);
                        let nothing_extra = (0..n).filter(|&x| probe[x] && small[x] == target).count() == seen.len();
                        agree_inside && nothing_extra
                    }
                };
            }
            labels[k] = full;
            cells[k] = list;
        }
        let out = CellDecomposition { ball, preorders, labels, cells };
        out.check()?;
        Ok(out)
    }

    fn check(&self) -> Result<()> {
        let b = &self.ball;
        let [left, right, two] = &self.labels;
        // w ↦ w⁻¹ must induce a bijection from left cells to right cells.
        // Boundary fragments of a two-sided cell may be swapped with each
        // other, so only stabilized two-sided cells must be fixed.
        let mut fwd: HashMap<usize, usize> = HashMap::new();
        let mut back: HashMap<usize, usize> = HashMap::new();
        for x in 0..b.len() {
            let xi = b.inverse(x);
            if two[x] != two[xi] && self.cells(CellKind::TwoSided)[two[x]].stabilized {
                return Err(Error::Invariant(format!("inversion moves {} to another two-sided cell", b.word(x))));
            }
            if *fwd.entry(left[x]).or_insert(right[xi]) != right[xi] || *back.entry(right[xi]).or_insert(left[x]) != left[x] {
                return Err(Error::Invariant("inversion does not map left cells onto right cells".into()));
            }
        }
        for kind in [CellKind::Left, CellKind::Right] {
            for c in self.cells(kind) {
                let t = two[c.members[0]];
                if c.members.iter().any(|&x| two[x] != t) {
                    return Err(Error::Invariant(format!("{kind:?} cell {} straddles two-sided cells", c.id)));
                }
            }
        }
        Ok(())
    }

    pub fn ball(&self) -> &Arc<Ball> {
        &self.ball
    }

    pub fn preorders(&self) -> &Preorders {
        &self.preorders
    }

    pub fn cells(&self, kind: CellKind) -> &[Cell] {
        &self.cells[kind_index(kind)]
    }

    pub fn cell(&self, kind: CellKind, id: usize) -> &Cell {
        &self.cells[kind_index(kind)][id]
    }

    /// Cell id of `x` for the given kind.
    pub fn label(&self, kind: CellKind, x: usize) -> usize {
        self.labels[kind_index(kind)][x]
    }

    pub fn cell_of(&self, kind: CellKind, x: usize) -> &Cell {
        self.cell(kind, self.label(kind, x))
    }

    pub fn stabilized(&self, kind: CellKind) -> Vec<&Cell> {
        self.cells(kind).iter().filter(|c| c.stabilized).collect()
    }

    /// Left cells contained in a two-sided cell.
    pub fn left_cells_in(&self, two_sided: usize) -> Vec<&Cell> {
        self.cells(CellKind::Left)
            .iter()
            .filter(|c| self.label(CellKind::TwoSided, c.members[0]) == two_sided)
            .collect()
    }

    pub fn right_cells_in(&self, two_sided: usize) -> Vec<&Cell> {
        self.cells(CellKind::Right)
            .iter()
            .filter(|c| self.label(CellKind::TwoSided, c.members[0]) == two_sided)
            .collect()
    }

    /// Second stabilization pass using the a-function. A two-sided cell stays
    /// stabilized only if its a-value is stabilized and no other cell with
    /// the same stabilized a-value lies strictly below or above it; two such
    /// cells would have to be one cell of the whole group. Left and right
    /// cells inside a demoted two-sided cell are demoted too.
    pub fn apply_a_function(&mut self, afn: &mut AFunction) {
        let two = self.preorders.two_sided();
        let count = self.cells(CellKind::TwoSided).len();
        let reach: Vec<Vec<bool>> = (0..count)
            .map(|c| {
                let start = self.cells[2][c].members[0];
                let mut seen = vec![false; self.ball.len()];
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(u) = stack.pop() {
                    for &w in &two[u] {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                (0..count).map(|d| seen[self.cells[2][d].members[0]]).collect()
            })
            .collect();
        let stable_a: Vec<Option<usize>> =
            (0..count).map(|c| afn.cell(c).filter(|v| v.stabilized).map(|v| v.value)).collect();
        let mut demote = vec![false; count];
        for c in 0..count {
            if stable_a[c].is_none() {
                demote[c] = true;
                continue;
            }
            for d in 0..count {
                if d != c && stable_a[d] == stable_a[c] && (reach[c][d] || reach[d][c]) {
                    demote[c] = true;
                    demote[d] = true;
                }
            }
        }
        for c in 0..count {
            if demote[c] {
                self.cells[2][c].stabilized = false;
                afn.demote_cell(c);
            }
        }
        for k in 0..2 {
            for cell in self.cells[k].iter_mut() {
                if demote[self.labels[2][cell.members[0]]] {
                    cell.stabilized = false;
                }
            }
        }
    }

    /// `x ≤_L y` inside the ball (reachability in the left preorder graph).
    pub fn left_leq(&self, x: usize, y: usize) -> bool {
        let mut seen = vec![false; self.ball.len()];
        let mut stack = vec![y];
        seen[y] = true;
        while let Some(u) = stack.pop() {
            if u == x {
                return true;
            }
            for &w in &self.preorders.left[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    /// The two-sided cell of `e`.
    pub fn identity_cell(&self) -> usize {
        self.label(CellKind::TwoSided, 0)
    }

    /// Canonical left cell of a two-sided cell: its members that are
    /// minimal in their coset `x·W_f`.
    pub fn canonical_left_cell(&self, two_sided: usize) -> Result<Vec<usize>> {
        let c = self.cell(CellKind::TwoSided, two_sided);
        if !c.stabilized {
            return Err(Error::Unstabilized(format!("two-sided cell {two_sided}")));
        }
        Ok(c.members.iter().copied().filter(|&x| self.ball.is_min_coset_rep(x)).collect())
    }
}

/// Everything computed on one ball: KL table, structure constants, cells
/// (with both stabilization passes applied), a-function and γ-table.
#[derive(Debug)]
pub struct CellAnalysis {
    pub kl: Arc<KlTable>,
    pub structure: StructureTable,
    pub cells: CellDecomposition,
    pub afn: AFunction,
    pub gamma: GammaTable,
}

impl CellAnalysis {
    pub fn build(kl: Arc<KlTable>) -> Result<Self> {
        let bound = kl.ball().radius();
        let mut cells = CellDecomposition::build(&kl)?;
        let structure = StructureTable::build(kl.clone(), bound)?;
        let mut afn = AFunction::compute(&structure, &cells)?;
        cells.apply_a_function(&mut afn);
        let gamma = GammaTable::build(&structure, &cells, &afn)?;
        Ok(CellAnalysis { kl, structure, cells, afn, gamma })
    }

    pub fn ball(&self) -> &Arc<Ball> {
        self.kl.ball()
    }
}

#[cfg(test)]
mod tests;
