use crate::error::Result;
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// Parts at or below this many vertices keep their natural order.
pub const ND_LEAF_SIZE: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderingKind {
    Natural,
    NestedDissection,
}

/// Symmetric permutation: row/column `i` of the reordered matrix is
/// row/column `perm[i]` of the original.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ordering {
    pub kind: OrderingKind,
    pub perm: Vec<usize>,
    pub inverse_perm: Vec<usize>,
}

impl Ordering {
    pub fn natural(n: usize) -> Self {
        Self {
            kind: OrderingKind::Natural,
            perm: (0..n).collect(),
            inverse_perm: (0..n).collect(),
        }
    }

    pub fn from_perm(kind: OrderingKind, perm: Vec<usize>) -> Result<Self> {
        let inverse_perm = crate::sparse::ops::inverse_permutation(&perm, perm.len())?;
        Ok(Self {
            kind,
            perm,
            inverse_perm,
        })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }
}

pub fn compute_ordering<T: Scalar>(a: &CsrMatrix<T>, kind: OrderingKind) -> Ordering {
    match kind {
        OrderingKind::Natural => Ordering::natural(a.nrows()),
        OrderingKind::NestedDissection => order_nested_dissection(a),
    }
}

/// Nested dissection by recursive BFS-level bisection.
pub fn order_nested_dissection<T: Scalar>(a: &CsrMatrix<T>) -> Ordering {
    order_nested_dissection_with_leaf(a, ND_LEAF_SIZE)
}

/// Nested dissection with a custom leaf size.
///
/// Each connected part larger than `leaf` is split at the median BFS level
/// from a pseudo-peripheral vertex; the two halves are ordered first
/// (recursively) and the separator level last.
pub fn order_nested_dissection_with_leaf<T: Scalar>(a: &CsrMatrix<T>, leaf: usize) -> Ordering {
    let n = a.nrows();
    let graph = Graph::from_pattern(a);
    let mut nd = Dissector {
        graph: &graph,
        leaf: leaf.max(1),
        region: vec![0; n],
        next_region: 1,
        level: vec![usize::MAX; n],
        out: Vec::with_capacity(n),
    };
    let all: Vec<usize> = (0..n).collect();
    nd.region.iter_mut().for_each(|r| *r = 0);
    nd.dissect(all, 0);
    let perm = nd.out;
    Ordering::from_perm(OrderingKind::NestedDissection, perm).expect("dissection visits every vertex once")
}

struct Dissector<'g> {
    graph: &'g Graph,
    leaf: usize,
    /// Region label; BFS only walks vertices carrying the current label.
    region: Vec<usize>,
    next_region: usize,
    level: Vec<usize>,
    out: Vec<usize>,
}

impl Dissector<'_> {
    fn fresh_region(&mut self, verts: &[usize]) -> usize {
        let id = self.next_region;
        self.next_region += 1;
        for &v in verts {
            self.region[v] = id;
        }
        id
    }

    /// BFS inside `region` from `root`; returns the level sets.
    fn bfs_levels(&mut self, root: usize, region: usize) -> Vec<Vec<usize>> {
        let mut levels = vec![vec![root]];
        self.level[root] = 0;
        let mut visited = vec![root];
        loop {
            let cur = levels.last().unwrap();
            let mut next = Vec::new();
            for &v in cur {
                for &u in self.graph.neighbors(v) {
                    if self.region[u] == region && self.level[u] == usize::MAX {
                        self.level[u] = levels.len();
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            visited.extend_from_slice(&next);
            levels.push(next);
        }
        for v in visited {
            self.level[v] = usize::MAX;
        }
        levels
    }

    /// Reverse Cuthill-McKee order of a leaf part, component by component.
    fn leaf_order(&mut self, verts: &[usize], region: usize) {
        let start = self.out.len();
        for &v in verts {
            if self.region[v] != region {
                continue;
            }
            let mut root = v;
            let mut levels = self.bfs_levels(root, region);
            loop {
                let far = *levels
                    .last()
                    .unwrap()
                    .iter()
                    .min_by_key(|&&u| (self.graph.degree(u), u))
                    .unwrap();
                let cand = self.bfs_levels(far, region);
                if cand.len() > levels.len() {
                    root = far;
                    levels = cand;
                } else {
                    break;
                }
            }
            let done = usize::MAX - 1;
            let comp_start = self.out.len();
            self.out.push(root);
            self.region[root] = done;
            let mut head = comp_start;
            while head < self.out.len() {
                let u = self.out[head];
                head += 1;
                let mut nb: Vec<usize> = self
                    .graph
                    .neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&w| self.region[w] == region)
                    .collect();
                nb.sort_unstable_by_key(|&w| (self.graph.degree(w), w));
                for w in nb {
                    self.region[w] = done;
                    self.out.push(w);
                }
            }
        }
        self.out[start..].reverse();
    }

    fn dissect(&mut self, mut verts: Vec<usize>, region: usize) {
        verts.sort_unstable();
        if verts.len() <= self.leaf {
            if self.out.is_empty() && verts.len() == self.graph.num_vertices() {
                self.out.extend_from_slice(&verts);
            } else {
                self.leaf_order(&verts, region);
            }
            return;
        }
        // Split off connected components first.
        let first = self.bfs_levels(verts[0], region);
        let reached: usize = first.iter().map(Vec::len).sum();
        if reached < verts.len() {
            let comp: Vec<usize> = first.into_iter().flatten().collect();
            let comp_region = self.fresh_region(&comp);
            let rest_region = self.next_region;
            self.next_region += 1;
            let rest: Vec<usize> = verts
                .iter()
                .copied()
                .filter(|&v| self.region[v] == region)
                .collect();
            for &v in &rest {
                self.region[v] = rest_region;
            }
            self.dissect(comp, comp_region);
            self.dissect(rest, rest_region);
            return;
        }

        // Pseudo-peripheral root.
        let mut root = verts[0];
        let mut levels = first;
        loop {
            let last = levels.last().unwrap();
            let far = *last
                .iter()
                .min_by_key(|&&v| (self.graph.degree(v), v))
                .unwrap();
            let cand = self.bfs_levels(far, region);
            if cand.len() > levels.len() {
                root = far;
                levels = cand;
            } else {
                break;
            }
        }
        let _ = root;

        let total = verts.len();
        let mut acc = 0;
        let mut median = levels.len() - 1;
        for (m, l) in levels.iter().enumerate() {
            acc += l.len();
            if 2 * acc >= total {
                median = m;
                break;
            }
        }
        let lower: Vec<usize> = levels[..median].iter().flatten().copied().collect();
        let upper: Vec<usize> = levels[median + 1..].iter().flatten().copied().collect();
        let mut sep = levels[median].clone();
        sep.sort_unstable();

        for &v in &sep {
            self.region[v] = usize::MAX;
        }
        if !lower.is_empty() {
            let r = self.fresh_region(&lower);
            self.dissect(lower, r);
        }
        if !upper.is_empty() {
            let r = self.fresh_region(&upper);
            self.dissect(upper, r);
        }
        self.out.extend_from_slice(&sep);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_separator_goes_last() {
        let a = CsrMatrix::<f64>::tridiagonal(7, -1.0, 2.0, -1.0);
        let o = order_nested_dissection_with_leaf(&a, 3);
        assert_eq!(o.perm[6], 3);
        let mut sorted = o.perm.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
        let o1 = order_nested_dissection_with_leaf(&a, 1);
        assert_eq!(o1.perm[6], 3);
    }

    #[test]
    fn small_graphs_keep_natural_order() {
        let a = CsrMatrix::<f64>::tridiagonal(20, -1.0, 2.0, -1.0);
        assert_eq!(order_nested_dissection(&a).perm, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn disconnected_graph_is_a_permutation() {
        let mut trip = Vec::new();
        for i in 0..80 {
            trip.push((i, i, 1.0));
            if i % 40 != 39 {
                trip.push((i, i + 1, -1.0));
                trip.push((i + 1, i, -1.0));
            }
        }
        let a = CsrMatrix::from_triplets(80, 80, &trip).unwrap();
        let o = order_nested_dissection_with_leaf(&a, 4);
        let mut seen = o.perm.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..80).collect::<Vec<_>>());
        for (i, &p) in o.perm.iter().enumerate() {
            assert_eq!(o.inverse_perm[p], i);
        }
    }
}
