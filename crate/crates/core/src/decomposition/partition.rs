use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::Grid3D;

/// Nonoverlapping assignment of nodes (and with them their dofs) to
/// subdomains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    num_subdomains: usize,
    dofs_per_node: usize,
    node_owner: Vec<usize>,
    boxes: Option<Vec<[Range<usize>; 3]>>,
}

impl Partition {
    /// Arbitrary node-to-subdomain assignment; every subdomain id below
    /// `num_subdomains` must own at least one node.
    pub fn from_node_owners(
        node_owner: Vec<usize>,
        num_subdomains: usize,
        dofs_per_node: usize,
    ) -> Result<Self> {
        if dofs_per_node == 0 {
            return Err(Error::InvalidPartition("dofs_per_node must be positive".into()));
        }
        let mut seen = vec![false; num_subdomains];
        for &o in &node_owner {
            if o >= num_subdomains {
                return Err(Error::InvalidPartition(format!(
                    "owner {o} out of range for {num_subdomains} subdomains"
                )));
            }
            seen[o] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("subdomain {empty} owns no nodes")));
        }
        Ok(Self {
            num_subdomains,
            dofs_per_node,
            node_owner,
            boxes: None,
        })
    }

    #[inline]
    pub fn num_subdomains(&self) -> usize {
        self.num_subdomains
    }

    #[inline]
    pub fn dofs_per_node(&self) -> usize {
        self.dofs_per_node
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.node_owner.len()
    }

    #[inline]
    pub fn num_dofs(&self) -> usize {
        self.node_owner.len() * self.dofs_per_node
    }

    #[inline]
    pub fn node_owner(&self, node: usize) -> usize {
        self.node_owner[node]
    }

    pub fn node_owners(&self) -> &[usize] {
        &self.node_owner
    }

    #[inline]
    pub fn owner(&self, dof: usize) -> usize {
        self.node_owner[dof / self.dofs_per_node]
    }

    /// Dof-level owner array.
    pub fn dof_owners(&self) -> Vec<usize> {
        (0..self.num_dofs()).map(|d| self.owner(d)).collect()
    }

    /// Lattice index ranges of each box, when built by [`box_partition`].
    pub fn boxes(&self) -> Option<&[[Range<usize>; 3]]> {
        self.boxes.as_deref()
    }

    /// Sorted dofs owned by subdomain `s`.
    pub fn owned_dofs(&self, s: usize) -> Vec<usize> {
        let dpn = self.dofs_per_node;
        self.node_owner
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == s)
            .flat_map(|(v, _)| (v * dpn)..(v * dpn + dpn))
            .collect()
    }
}

/// Splits `n` lattice points into `parts` contiguous ranges; the remainder
/// goes to the leading ranges.
pub fn box_ranges(n: usize, parts: usize) -> Result<Vec<Range<usize>>> {
    if parts == 0 || parts > n {
        return Err(Error::InvalidPartition(format!(
            "cannot split {n} nodes into {parts} boxes"
        )));
    }
    let (base, rem) = (n / parts, n % parts);
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for p in 0..parts {
        let len = base + usize::from(p < rem);
        out.push(start..start + len);
        start += len;
    }
    Ok(out)
}

/// Box partition of the lattice into `px × py × pz` subdomains, numbered
/// `bx + px (by + py bz)`. `nodes` lists the lattice position of each
/// system node (nodes removed by boundary elimination are simply absent).
pub fn box_partition(
    grid: &Grid3D,
    nodes: &[[usize; 3]],
    px: usize,
    py: usize,
    pz: usize,
) -> Result<Partition> {
    let rx = box_ranges(grid.nx, px)?;
    let ry = box_ranges(grid.ny, py)?;
    let rz = box_ranges(grid.nz, pz)?;
    let lookup = |ranges: &[Range<usize>], x: usize| ranges.iter().position(|r| r.contains(&x));
    let mut node_owner = Vec::with_capacity(nodes.len());
    for &[i, j, k] in nodes {
        let (Some(bx), Some(by), Some(bz)) = (lookup(&rx, i), lookup(&ry, j), lookup(&rz, k))
        else {
            return Err(Error::InvalidPartition(format!(
                "node ({i}, {j}, {k}) outside the grid"
            )));
        };
        node_owner.push(bx + px * (by + py * bz));
    }
    let mut part = Partition::from_node_owners(node_owner, px * py * pz, grid.dofs_per_node)?;
    let mut boxes = Vec::with_capacity(px * py * pz);
    for z in &rz {
        for y in &ry {
            for x in &rx {
                boxes.push([x.clone(), y.clone(), z.clone()]);
            }
        }
    }
    part.boxes = Some(boxes);
    Ok(part)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(g: &Grid3D) -> Vec<[usize; 3]> {
        let mut v = Vec::new();
        for k in 0..g.nz {
            for j in 0..g.ny {
                for i in 0..g.nx {
                    v.push([i, j, k]);
                }
            }
        }
        v
    }

    #[test]
    fn balanced_remainder() {
        assert_eq!(box_ranges(5, 2).unwrap(), vec![0..3, 3..5]);
        assert!(box_ranges(2, 3).is_err());
        assert!(box_ranges(2, 0).is_err());
    }

    #[test]
    fn four_by_four_slice_into_quadrants() {
        let g = Grid3D::new(4, 4, 2, 1).unwrap();
        let p = box_partition(&g, &lattice(&g), 2, 2, 1).unwrap();
        assert_eq!(p.num_subdomains(), 4);
        for s in 0..4 {
            // 2×2 nodes in the slice, two layers in z.
            assert_eq!(p.owned_dofs(s).len(), 8);
        }
        assert_eq!(p.owner(g.node_index(1, 1, 0)), 0);
        assert_eq!(p.owner(g.node_index(2, 1, 1)), 1);
        assert_eq!(p.owner(g.node_index(1, 2, 0)), 2);
        assert_eq!(p.owner(g.node_index(3, 3, 1)), 3);
    }

    #[test]
    fn single_box_owns_everything() {
        let g = Grid3D::cube(3, 3).unwrap();
        let p = box_partition(&g, &lattice(&g), 1, 1, 1).unwrap();
        assert!(p.dof_owners().iter().all(|&o| o == 0));
        assert_eq!(p.num_dofs(), 81);
    }

    #[test]
    fn node_dofs_share_owner() {
        let g = Grid3D::cube(4, 3).unwrap();
        let p = box_partition(&g, &lattice(&g), 2, 1, 2).unwrap();
        for v in 0..p.num_nodes() {
            let o = p.owner(3 * v);
            assert_eq!(p.owner(3 * v + 1), o);
            assert_eq!(p.owner(3 * v + 2), o);
        }
    }

    #[test]
    fn too_many_boxes() {
        let g = Grid3D::cube(3, 1).unwrap();
        assert!(box_partition(&g, &lattice(&g), 4, 1, 1).is_err());
    }

    #[test]
    fn empty_subdomain_rejected() {
        assert!(Partition::from_node_owners(vec![0, 0, 2], 3, 1).is_err());
        assert!(Partition::from_node_owners(vec![0, 3], 2, 1).is_err());
    }
}
