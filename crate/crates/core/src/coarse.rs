//! Energy-minimizing coarse basis and Galerkin coarse operator.
//!
//! For every interface component `c` and null-space column `k` one coarse
//! function is built: on the interface it equals `D_c · Z[c, k]`, in each
//! subdomain interior it is the discrete harmonic extension
//! `φ_I = −A_II⁻¹ A_IΓ φ_Γ`.

use rayon::prelude::*;

use crate::decomposition::InterfaceStructure;
use crate::error::{Error, Result};
use crate::local::{LocalFactorization, TriangularWorkspace};
use crate::scalar::Scalar;
use crate::sparse::{extract_submatrix, spgemm, transpose, CsrMatrix, DenseColumnBlock, IndexMap};

/// Columns whose restriction has norm at or below this times `max|Z|` are zero.
pub const ZERO_COLUMN_TOL: f64 = 1e-12;
/// A column is dependent when its component orthogonal to the kept columns is
/// at or below this times its own norm.
pub const DEPENDENT_COLUMN_TOL: f64 = 1e-10;

/// Origin of one coarse basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoarseColumn {
    pub component: usize,
    pub nullspace_column: usize,
}

/// Interface values of the coarse functions, one block per component with
/// rows aligned to the component's dofs.
#[derive(Clone, Debug)]
pub struct InterfaceBasis<T: Scalar> {
    pub blocks: Vec<DenseColumnBlock<T>>,
    /// Null-space column of every kept block column, per component.
    pub kept: Vec<Vec<usize>>,
    pub dropped: Vec<CoarseColumn>,
}

impl<T: Scalar> InterfaceBasis<T> {
    pub fn num_columns(&self) -> usize {
        self.blocks.iter().map(|b| b.ncols()).sum()
    }

    /// Global coarse column order: components in order, kept columns within.
    pub fn column_map(&self) -> Vec<CoarseColumn> {
        self.kept
            .iter()
            .enumerate()
            .flat_map(|(component, cols)| {
                cols.iter().map(move |&k| CoarseColumn {
                    component,
                    nullspace_column: k,
                })
            })
            .collect()
    }
}

/// `Φ`, `Φᵀ`, `A₀ = Φᵀ A Φ` and per-column extension residuals.
#[derive(Clone, Debug)]
pub struct CoarseBasis<T: Scalar> {
    pub phi: CsrMatrix<T>,
    pub phi_t: CsrMatrix<T>,
    pub a0: CsrMatrix<T>,
    pub column_map: Vec<CoarseColumn>,
    /// `‖A_II φ_I + A_IΓ φ_Γ‖∞ / (‖A‖∞ ‖φ_Γ‖∞)`, worst subdomain, per column.
    pub residuals: Vec<f64>,
}

impl<T: Scalar> CoarseBasis<T> {
    pub fn num_columns(&self) -> usize {
        self.phi.ncols()
    }
}

/// Restricts `z` to every component and scales by the partition-of-unity
/// weights. Zero and linearly dependent columns are dropped per component;
/// kept columns hold exactly `D · Z`.
pub fn interface_basis<T: Scalar>(
    z: &DenseColumnBlock<T>,
    structure: &InterfaceStructure,
) -> Result<InterfaceBasis<T>> {
    if z.nrows() != structure.num_dofs() {
        return Err(Error::DimensionMismatch {
            op: "interface basis (null space rows)",
            expected: structure.num_dofs(),
            found: z.nrows(),
        });
    }
    if structure.mode.is_none() {
        return Err(Error::InvalidConfig(
            "interface components have not been built".into(),
        ));
    }
    let zmax = z.max_abs().as_f64();
    let mut blocks = Vec::with_capacity(structure.components.len());
    let mut kept = Vec::with_capacity(structure.components.len());
    let mut dropped = Vec::new();
    for (c, comp) in structure.components.iter().enumerate() {
        let m = comp.dofs.len();
        let mut cols: Vec<Vec<T>> = Vec::new();
        let mut keep = Vec::new();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for k in 0..z.ncols() {
            let zk = z.column(k);
            let col: Vec<T> = comp
                .dofs
                .iter()
                .enumerate()
                .map(|(r, d)| zk[d] * T::of_f64(comp.weight(r)))
                .collect();
            let v: Vec<f64> = col.iter().map(|x| x.as_f64()).collect();
            let norm = norm2(&v);
            let mut w = v;
            for _ in 0..2 {
                for q in &basis {
                    let d: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
                }
            }
            let rest = norm2(&w);
            if norm <= ZERO_COLUMN_TOL * zmax || rest <= DEPENDENT_COLUMN_TOL * norm {
                dropped.push(CoarseColumn {
                    component: c,
                    nullspace_column: k,
                });
                continue;
            }
            basis.push(w.iter().map(|x| x / rest).collect());
            cols.push(col);
            keep.push(k);
        }
        if cols.is_empty() {
            log::warn!("interface component {c} contributes no coarse functions");
        }
        blocks.push(DenseColumnBlock::from_columns(m, cols));
        kept.push(keep);
    }
    Ok(InterfaceBasis {
        blocks,
        kept,
        dropped,
    })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `A_{I_i I_i}` for every subdomain interior.
pub fn interior_blocks<T: Scalar>(
    a: &CsrMatrix<T>,
    structure: &InterfaceStructure,
) -> Result<Vec<CsrMatrix<T>>> {
    structure
        .subdomain_interiors
        .par_iter()
        .map(|dofs| extract_submatrix(a, dofs, dofs))
        .collect()
}

/// Builds `Φ` from interface values by solving with each interior block.
///
/// `interior_factors[i]` must factor `A_{I_i I_i}`. Work is spread over
/// (subdomain, column) pairs; every pair writes its own rows, so the result
/// does not depend on scheduling.
pub fn harmonic_extension<T: Scalar>(
    a: &CsrMatrix<T>,
    structure: &InterfaceStructure,
    basis: &InterfaceBasis<T>,
    interior_factors: &[LocalFactorization<T>],
) -> Result<(CsrMatrix<T>, Vec<f64>)> {
    let n = structure.num_dofs();
    if a.nrows() != n {
        return Err(Error::DimensionMismatch {
            op: "harmonic extension",
            expected: n,
            found: a.nrows(),
        });
    }
    let nsub = structure.subdomain_interiors.len();
    if interior_factors.len() != nsub {
        return Err(Error::DimensionMismatch {
            op: "harmonic extension (interior factors)",
            expected: nsub,
            found: interior_factors.len(),
        });
    }

    // Global column offset of every component.
    let mut offset = Vec::with_capacity(basis.blocks.len() + 1);
    offset.push(0);
    for b in &basis.blocks {
        offset.push(offset.last().unwrap() + b.ncols());
    }
    let ncols = *offset.last().unwrap();

    // Components touching each interface dof.
    let mut dof_comps: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, comp) in structure.components.iter().enumerate() {
        for d in comp.dofs.iter() {
            dof_comps[d].push(c);
        }
    }

    // (subdomain, component) pairs with coupling between interior and component.
    let mut tasks: Vec<(usize, usize, usize)> = Vec::new();
    for (s, interior) in structure.subdomain_interiors.iter().enumerate() {
        let mut comps: Vec<usize> = Vec::new();
        for d in interior.iter() {
            for &col in a.row(d).0 {
                comps.extend_from_slice(&dof_comps[col]);
            }
        }
        comps.sort_unstable();
        comps.dedup();
        for c in comps {
            for k in 0..basis.blocks[c].ncols() {
                tasks.push((s, c, k));
            }
        }
    }

    let a_norm = a.norm_inf().as_f64();
    let solved: Vec<(Vec<T>, f64)> = tasks
        .par_iter()
        .map(|&(s, c, k)| {
            let interior = &structure.subdomain_interiors[s];
            let comp = &structure.components[c].dofs;
            let vals = basis.blocks[c].column(k);
            let rhs: Vec<T> = interior
                .iter()
                .map(|d| {
                    let (cols, av) = a.row(d);
                    let mut acc = T::zero();
                    for (&col, &v) in cols.iter().zip(av) {
                        if let Some(p) = comp.position(col) {
                            acc -= v * vals[p];
                        }
                    }
                    acc
                })
                .collect();
            let fac = &interior_factors[s];
            let mut x = vec![T::zero(); interior.len()];
            let mut ws = TriangularWorkspace::new(interior.len());
            fac.solve_into(&rhs, &mut x, &mut ws)
                .map_err(|e| Error::SingularInterior {
                    subdomain: s,
                    source: Box::new(e),
                })?;
            let res = extension_residual(a, interior, &x, &rhs);
            let gmax = vals.iter().fold(0.0f64, |m, v| m.max(v.as_f64().abs()));
            let scale = (a_norm * gmax).max(f64::MIN_POSITIVE);
            Ok((x, res / scale))
        })
        .collect::<Result<_>>()?;

    let mut residuals = vec![0.0f64; ncols];
    let mut trip: Vec<(usize, usize, T)> = Vec::new();
    for (c, comp) in structure.components.iter().enumerate() {
        for k in 0..basis.blocks[c].ncols() {
            let col = offset[c] + k;
            for (r, d) in comp.dofs.iter().enumerate() {
                trip.push((d, col, basis.blocks[c].get(r, k)));
            }
        }
    }
    for (&(s, c, k), (x, res)) in tasks.iter().zip(solved) {
        let col = offset[c] + k;
        residuals[col] = residuals[col].max(res);
        for (d, v) in structure.subdomain_interiors[s].iter().zip(x) {
            trip.push((d, col, v));
        }
    }
    let phi = CsrMatrix::from_triplets(n, ncols, &trip)?;
    Ok((phi, residuals))
}

/// `‖A_II x − rhs‖∞` using the rows of `a` restricted to `interior`.
fn extension_residual<T: Scalar>(a: &CsrMatrix<T>, interior: &IndexMap, x: &[T], rhs: &[T]) -> f64 {
    let mut worst = 0.0f64;
    for (r, d) in interior.iter().enumerate() {
        let (cols, vals) = a.row(d);
        let mut acc = -rhs[r];
        for (&col, &v) in cols.iter().zip(vals) {
            if let Some(p) = interior.position(col) {
                acc += v * x[p];
            }
        }
        worst = worst.max(acc.as_f64().abs());
    }
    worst
}

/// `A₀ = Φᵀ (A Φ)`.
pub fn coarse_matrix<T: Scalar>(a: &CsrMatrix<T>, phi: &CsrMatrix<T>) -> Result<CsrMatrix<T>> {
    let ap = spgemm(a, phi)?;
    spgemm(&transpose(phi), &ap)
}

/// Interface basis, harmonic extension and coarse matrix in one call.
pub fn build_coarse_basis<T: Scalar>(
    a: &CsrMatrix<T>,
    z: &DenseColumnBlock<T>,
    structure: &InterfaceStructure,
    interior_factors: &[LocalFactorization<T>],
) -> Result<CoarseBasis<T>> {
    let basis = interface_basis(z, structure)?;
    if basis.num_columns() == 0 {
        return Err(Error::SingularCoarse(Box::new(Error::InvalidConfig(
            "every coarse column was dropped".into(),
        ))));
    }
    let (phi, residuals) = harmonic_extension(a, structure, &basis, interior_factors)?;
    let a0 = coarse_matrix(a, &phi)?;
    Ok(CoarseBasis {
        phi_t: transpose(&phi),
        phi,
        a0,
        column_map: basis.column_map(),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_column_picks_corner_entry() {
        let a = CsrMatrix::<f64>::tridiagonal(4, -1.0, 2.0, -1.0);
        let phi = CsrMatrix::from_triplets(4, 1, &[(0, 0, 1.0)]).unwrap();
        let a0 = coarse_matrix(&a, &phi).unwrap();
        assert_eq!(a0.to_dense(), vec![2.0]);
    }

    #[test]
    fn identity_basis_returns_a() {
        let a = CsrMatrix::from_dense(3, 3, &[4.0, -1.0, 0.0, -1.0, 4.0, -2.0, 0.0, -2.0, 5.0]);
        let a0 = coarse_matrix(&a, &CsrMatrix::identity(3)).unwrap();
        assert_eq!(a0.to_dense(), a.to_dense());
    }
}
