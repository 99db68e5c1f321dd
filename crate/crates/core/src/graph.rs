//! Undirected adjacency graphs derived from matrix patterns.

use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Symmetric adjacency lists without self loops, neighbours sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ptr: Vec<usize>,
    adj: Vec<usize>,
}

impl Graph {
    /// Graph of `pattern(A) ∪ pattern(Aᵀ)`, diagonal excluded.
    pub fn from_pattern<T: Scalar>(a: &CsrMatrix<T>) -> Self {
        Self::node_graph(a, 1)
    }

    /// Graph on node blocks: nodes `u != v` are adjacent when any dof of `u`
    /// couples to any dof of `v`. Dof `d` belongs to node `d / dofs_per_node`.
    pub fn node_graph<T: Scalar>(a: &CsrMatrix<T>, dofs_per_node: usize) -> Self {
        assert!(dofs_per_node > 0);
        let nn = a.nrows().div_ceil(dofs_per_node);
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); nn];
        for i in 0..a.nrows() {
            let u = i / dofs_per_node;
            for &j in a.row(i).0 {
                let v = j / dofs_per_node;
                if u != v {
                    lists[u].push(v);
                    lists[v].push(u);
                }
            }
        }
        Self::from_lists(lists)
    }

    pub fn from_lists(mut lists: Vec<Vec<usize>>) -> Self {
        let mut ptr = Vec::with_capacity(lists.len() + 1);
        let mut adj = Vec::new();
        ptr.push(0);
        for l in lists.iter_mut() {
            l.sort_unstable();
            l.dedup();
            adj.extend_from_slice(l);
            ptr.push(adj.len());
        }
        Self { ptr, adj }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.ptr.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.ptr[v + 1] - self.ptr[v]
    }
}
