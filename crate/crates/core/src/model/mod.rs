//! Structured-grid model problems on the unit cube.

mod elasticity;
mod laplace;

pub use elasticity::{assemble_elasticity3d, hex8_stiffness, Material};
pub use laplace::assemble_laplace3d;

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DenseColumnBlock};

/// Uniform node lattice on `[0, 1]³` with `h = 1 / (n - 1)` per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid3D {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dofs_per_node: usize,
}

impl Grid3D {
    pub fn new(nx: usize, ny: usize, nz: usize, dofs_per_node: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || nz < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes per axis, got {nx}x{ny}x{nz}"
            )));
        }
        if dofs_per_node == 0 {
            return Err(Error::InvalidGrid("dofs_per_node must be positive".into()));
        }
        Ok(Self {
            nx,
            ny,
            nz,
            dofs_per_node,
        })
    }

    pub fn cube(n: usize, dofs_per_node: usize) -> Result<Self> {
        Self::new(n, n, n, dofs_per_node)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn num_nodes(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    /// Dof count of the full lattice (before any boundary elimination).
    pub fn num_dofs(&self) -> usize {
        self.num_nodes() * self.dofs_per_node
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.dims().map(|n| 1.0 / (n - 1) as f64)
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Laplace3d,
    Elasticity3d,
}

/// An assembled operator together with the geometry and null space the
/// decomposition and coarse space need.
///
/// Dofs are numbered node-major: dof `d` belongs to node `d / dofs_per_node`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    pub grid: Grid3D,
    pub boundary: BoundaryKind,
    pub matrix: CsrMatrix<f64>,
    /// Lattice position `(i, j, k)` of every node kept in the system.
    pub nodes: Vec<[usize; 3]>,
    pub coords: Vec<[f64; 3]>,
    pub dofs_per_node: usize,
    /// `n × n_n` null-space basis of the Neumann operator evaluated at the
    /// system dofs; each column scaled to unit max-norm.
    pub nullspace: DenseColumnBlock<f64>,
}

impl ProblemInstance {
    pub fn num_dofs(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn nullspace_dim(&self) -> usize {
        self.nullspace.ncols()
    }
}

pub(crate) fn normalize_max(col: &mut [f64]) {
    let m = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m > 0.0 {
        col.iter_mut().for_each(|v| *v /= m);
    }
}
