use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::hecke::{generator_product, KlTable};

/// Edge lists of the left preorder restricted to a ball: `y → x` records
/// `x ≤_L y`, i.e. `C_x` occurs in `C_g C_y` for a generator `g ∈ S ∪ Ω`.
/// Right edges are the images of left edges under inversion.
#[derive(Clone, Debug)]
pub struct Preorders {
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
}

impl Preorders {
    pub fn build(kl: &KlTable) -> Self {
        let ball = kl.ball();
        let n = ball.len();
        let mut left: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (y, out) in left.iter_mut().enumerate() {
            for i in 0..ball.num_generators() {
                let (prod, _) = generator_product(kl, i, y);
                out.extend(prod.into_iter().map(|t| t.0));
            }
            for k in 0..ball.omega_count() {
                out.push(ball.omega_mul(k, y));
            }
            out.sort_unstable();
            out.dedup();
        }
        let mut right: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (y, xs) in left.iter().enumerate() {
            for &x in xs {
                right[ball.inverse(y)].push(ball.inverse(x));
            }
        }
        for r in right.iter_mut() {
            r.sort_unstable();
            r.dedup();
        }
        Preorders { left, right }
    }

    pub fn two_sided(&self) -> Vec<Vec<usize>> {
        self.left
            .iter()
            .zip(&self.right)
            .map(|(l, r)| {
                let mut v: Vec<usize> = l.iter().chain(r).copied().collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }
}

/// Strongly connected components of a graph given as adjacency lists,
/// returned as a component id per vertex. Ids follow the smallest member,
/// so the labelling is deterministic.
pub fn scc_labels(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for (a, outs) in adj.iter().enumerate() {
        for &b in outs {
            g.add_edge(nodes[a], nodes[b], ());
        }
    }
    let mut comps: Vec<Vec<usize>> =
        tarjan_scc(&g).into_iter().map(|c| c.into_iter().map(|v| v.index()).collect()).collect();
    for c in comps.iter_mut() {
        c.sort_unstable();
    }
    comps.sort_by_key(|c| c[0]);
    let mut label = vec![0; n];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            label[v] = i;
        }
    }
    label
}
