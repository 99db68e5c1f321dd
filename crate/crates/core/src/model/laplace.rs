use super::{BoundaryKind, Grid3D, ProblemInstance, ProblemKind};
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, DenseColumnBlock};

/// 7-point finite-difference Laplacian on the lattice.
///
/// - `Neumann`: one-sided stencils at the boundary, so `A·1 = 0` and every
///   row sums to zero exactly.
/// - `Dirichlet`: homogeneous values on a ghost layer just outside the
///   lattice; every row keeps the full `6/h²` diagonal and the constrained
///   values never appear in the system.
///
/// Couplings are `(n_axis − 1)²`, which are exact integers.
pub fn assemble_laplace3d(grid: Grid3D, boundary: BoundaryKind) -> Result<ProblemInstance> {
    if grid.dofs_per_node != 1 {
        return Err(Error::InvalidGrid(format!(
            "Laplace needs one dof per node, got {}",
            grid.dofs_per_node
        )));
    }
    let [nx, ny, nz] = grid.dims();
    if nx < 2 || ny < 2 || nz < 2 {
        return Err(Error::InvalidGrid(format!("grid {nx}x{ny}x{nz} too small")));
    }
    let w = grid.dims().map(|n| ((n - 1) * (n - 1)) as f64);
    let n = grid.num_nodes();
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(7 * n);
    let mut values = Vec::with_capacity(7 * n);
    let mut nodes = Vec::with_capacity(n);
    let mut coords = Vec::with_capacity(n);
    let h = grid.spacing();
    row_ptr.push(0);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let me = grid.node_index(i, j, k);
                let mut diag = 0.0;
                let mut lower: Vec<(usize, f64)> = Vec::with_capacity(3);
                let mut upper: Vec<(usize, f64)> = Vec::with_capacity(3);
                let pos = [i, j, k];
                let dims = [nx, ny, nz];
                let stride = [1, nx, nx * ny];
                // Lower neighbours in decreasing stride so columns come out sorted.
                for axis in (0..3).rev() {
                    if pos[axis] > 0 {
                        lower.push((me - stride[axis], -w[axis]));
                        diag += w[axis];
                    } else if boundary == BoundaryKind::Dirichlet {
                        diag += w[axis];
                    }
                }
                for axis in 0..3 {
                    if pos[axis] + 1 < dims[axis] {
                        upper.push((me + stride[axis], -w[axis]));
                        diag += w[axis];
                    } else if boundary == BoundaryKind::Dirichlet {
                        diag += w[axis];
                    }
                }
                for (c, v) in lower {
                    col_idx.push(c);
                    values.push(v);
                }
                col_idx.push(me);
                values.push(diag);
                for (c, v) in upper {
                    col_idx.push(c);
                    values.push(v);
                }
                row_ptr.push(col_idx.len());
                nodes.push([i, j, k]);
                coords.push([i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]]);
            }
        }
    }
    let matrix = CsrMatrix::try_new(n, n, row_ptr, col_idx, values)?;
    let nullspace = DenseColumnBlock::from_columns(n, vec![vec![1.0; n]]);
    Ok(ProblemInstance {
        kind: ProblemKind::Laplace3d,
        grid,
        boundary,
        matrix,
        nodes,
        coords,
        dofs_per_node: 1,
        nullspace,
    })
}
