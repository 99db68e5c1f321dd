use rayon::prelude::*;

use super::Partition;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::sparse::{CsrMatrix, IndexMap};

/// Overlapping subdomains `Ω_i'`: each owned set grown by `width` layers of
/// the node adjacency graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OverlapSets {
    pub width: usize,
    pub sets: Vec<IndexMap>,
}

impl OverlapSets {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn total_size(&self) -> usize {
        self.sets.iter().map(IndexMap::len).sum()
    }
}

/// Grows every subdomain by `width` breadth-first layers of
/// `adjacency(A)` on node blocks. `width = 0` returns the owned sets.
pub fn extend_overlap<T: Scalar>(a: &CsrMatrix<T>, part: &Partition, width: usize) -> OverlapSets {
    let dpn = part.dofs_per_node();
    let graph = Graph::node_graph(a, dpn);
    let sets = (0..part.num_subdomains())
        .into_par_iter()
        .map(|s| {
            let mut in_set = vec![false; part.num_nodes()];
            let mut frontier: Vec<usize> = (0..part.num_nodes())
                .filter(|&v| part.node_owner(v) == s)
                .collect();
            for &v in &frontier {
                in_set[v] = true;
            }
            for _ in 0..width {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &u in graph.neighbors(v) {
                        if !in_set[u] {
                            in_set[u] = true;
                            next.push(u);
                        }
                    }
                }
                if next.is_empty() {
                    break;
                }
                frontier = next;
            }
            let dofs: Vec<usize> = in_set
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .flat_map(|(v, _)| (v * dpn)..(v * dpn + dpn))
                .collect();
            IndexMap::new(dofs).expect("node order yields sorted dofs")
        })
        .collect();
    OverlapSets { width, sets }
}
