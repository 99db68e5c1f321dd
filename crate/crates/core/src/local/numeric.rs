use std::sync::Arc;

use super::symbolic::{FillLevel, SymbolicFactorization};
use super::trisolve::{trisolve_levelset_into, TriangularWorkspace};
use super::fast::fast_trisolve_into;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorMethod {
    ExactLu,
    Ilu,
    /// Fixed-point ILU; solves use fixed-point triangular iterations.
    FastIlu { sweeps: usize, trisolve_iters: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IluOptions {
    /// Diagonal entries are multiplied by `1 + diagonal_shift` before factoring.
    pub diagonal_shift: f64,
}

/// Numeric factors `P A Pᵀ ≈ L U` on a shared symbolic structure.
#[derive(Clone, Debug)]
pub struct LocalFactorization<T: Scalar> {
    pub(crate) symbolic: Arc<SymbolicFactorization>,
    pub(crate) l: Vec<T>,
    pub(crate) u: Vec<T>,
    pub(crate) method: FactorMethod,
    pub(crate) factor_residuals: Vec<f64>,
}

impl<T: Scalar> LocalFactorization<T> {
    pub fn n(&self) -> usize {
        self.symbolic.n()
    }

    pub fn symbolic(&self) -> &Arc<SymbolicFactorization> {
        &self.symbolic
    }

    pub fn method(&self) -> FactorMethod {
        self.method
    }

    pub fn l_values(&self) -> &[T] {
        &self.l
    }

    pub fn u_values(&self) -> &[T] {
        &self.u
    }

    /// `Σ |a_ij − (LU)_ij|` over the pattern of `A`, one entry per sweep
    /// (starting with the initial guess). Empty for direct factorizations.
    pub fn factor_residuals(&self) -> &[f64] {
        &self.factor_residuals
    }

    /// `L` with its unit diagonal, in the permuted numbering.
    pub fn l_matrix(&self) -> CsrMatrix<T> {
        let (ptr, idx) = self.symbolic.l_pattern();
        let n = self.n();
        let mut trip = Vec::with_capacity(idx.len() + n);
        for i in 0..n {
            for p in ptr[i]..ptr[i + 1] {
                trip.push((i, idx[p], self.l[p]));
            }
            trip.push((i, i, T::one()));
        }
        CsrMatrix::from_triplets(n, n, &trip).expect("factor pattern in range")
    }

    /// `U` in the permuted numbering.
    pub fn u_matrix(&self) -> CsrMatrix<T> {
        let (ptr, idx) = self.symbolic.u_pattern();
        let n = self.n();
        let mut trip = Vec::with_capacity(idx.len());
        for i in 0..n {
            for p in ptr[i]..ptr[i + 1] {
                trip.push((i, idx[p], self.u[p]));
            }
        }
        CsrMatrix::from_triplets(n, n, &trip).expect("factor pattern in range")
    }

    pub fn workspace(&self) -> TriangularWorkspace<T> {
        TriangularWorkspace::new(self.n())
    }

    /// `x ≈ A⁻¹ b` in the original numbering.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let mut x = vec![T::zero(); self.n()];
        let mut ws = self.workspace();
        self.solve_into(b, &mut x, &mut ws)?;
        Ok(x)
    }

    pub fn solve_into(&self, b: &[T], x: &mut [T], ws: &mut TriangularWorkspace<T>) -> Result<()> {
        match self.method {
            FactorMethod::ExactLu | FactorMethod::Ilu => trisolve_levelset_into(self, b, x, ws),
            FactorMethod::FastIlu { trisolve_iters, .. } => {
                fast_trisolve_into(self, b, x, ws, trisolve_iters)
            }
        }
    }
}

/// Pivots at or below this multiple of `‖A‖∞` are rejected.
pub(crate) fn pivot_tolerance<T: Scalar>(a: &CsrMatrix<T>) -> T {
    T::epsilon() * T::of_f64(45.0) * a.norm_inf()
}

/// Exact LU on a [`FillLevel::Exact`] symbolic structure.
pub fn numeric_lu<T: Scalar>(
    symbolic: Arc<SymbolicFactorization>,
    a: &CsrMatrix<T>,
) -> Result<LocalFactorization<T>> {
    if symbolic.fill() != FillLevel::Exact {
        return Err(Error::InvalidConfig(
            "exact LU needs a symbolic factorization with complete fill".into(),
        ));
    }
    factor(symbolic, a, IluOptions::default(), FactorMethod::ExactLu)
}

/// Incomplete LU restricted to the symbolic pattern.
pub fn numeric_ilu<T: Scalar>(
    symbolic: Arc<SymbolicFactorization>,
    a: &CsrMatrix<T>,
) -> Result<LocalFactorization<T>> {
    factor(symbolic, a, IluOptions::default(), FactorMethod::Ilu)
}

pub fn numeric_ilu_with<T: Scalar>(
    symbolic: Arc<SymbolicFactorization>,
    a: &CsrMatrix<T>,
    options: IluOptions,
) -> Result<LocalFactorization<T>> {
    factor(symbolic, a, options, FactorMethod::Ilu)
}

fn factor<T: Scalar>(
    symbolic: Arc<SymbolicFactorization>,
    a: &CsrMatrix<T>,
    options: IluOptions,
    method: FactorMethod,
) -> Result<LocalFactorization<T>> {
    let (mut l, mut u) = symbolic.scatter_values(a)?;
    let n = symbolic.n();
    let (l_ptr, l_idx) = symbolic.l_pattern();
    let (u_ptr, u_idx) = symbolic.u_pattern();
    if options.diagonal_shift != 0.0 {
        let s = T::one() + T::of_f64(options.diagonal_shift);
        for i in 0..n {
            u[u_ptr[i]] *= s;
        }
    }
    let tol = pivot_tolerance(a);
    let perm = &symbolic.ordering().perm;
    let nnz_l = l.len();
    const NONE: usize = usize::MAX;
    let mut pos = vec![NONE; n];

    for i in 0..n {
        for p in l_ptr[i]..l_ptr[i + 1] {
            pos[l_idx[p]] = p;
        }
        for q in u_ptr[i]..u_ptr[i + 1] {
            pos[u_idx[q]] = nnz_l + q;
        }
        for p in l_ptr[i]..l_ptr[i + 1] {
            let j = l_idx[p];
            let lij = l[p] / u[u_ptr[j]];
            l[p] = lij;
            for q in u_ptr[j] + 1..u_ptr[j + 1] {
                let slot = pos[u_idx[q]];
                if slot == NONE {
                    continue;
                }
                let delta = lij * u[q];
                if slot < nnz_l {
                    l[slot] -= delta;
                } else {
                    u[slot - nnz_l] -= delta;
                }
            }
        }
        for p in l_ptr[i]..l_ptr[i + 1] {
            pos[l_idx[p]] = NONE;
        }
        for q in u_ptr[i]..u_ptr[i + 1] {
            pos[u_idx[q]] = NONE;
        }
        let piv = u[u_ptr[i]];
        if !(piv.abs() > tol) || !piv.is_finite() {
            return Err(Error::ZeroPivot {
                row: i,
                original: perm[i],
                value: piv.as_f64(),
            });
        }
    }

    Ok(LocalFactorization {
        symbolic,
        l,
        u,
        method,
        factor_residuals: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{symbolic_ilu_k, symbolic_lu, Ordering};

    #[test]
    fn lu_of_tridiagonal_solves_exactly() {
        let a = CsrMatrix::<f64>::tridiagonal(5, -1.0, 2.0, -1.0);
        let s = Arc::new(symbolic_lu(&a, Ordering::natural(5)).unwrap());
        let f = numeric_lu(s, &a).unwrap();
        let x = f.solve(&a.mul_vec(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        for (k, v) in x.iter().enumerate() {
            assert!((v - (k + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_pivot_reports_row() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 0.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 0.0)])
            .unwrap();
        let s = Arc::new(symbolic_lu(&a, Ordering::natural(2)).unwrap());
        match numeric_lu(s, &a) {
            Err(Error::ZeroPivot { row, original, .. }) => {
                assert_eq!((row, original), (0, 0));
            }
            other => panic!("expected zero pivot, got {other:?}"),
        }
    }

    #[test]
    fn lu_requires_complete_fill() {
        let a = CsrMatrix::<f64>::tridiagonal(3, -1.0, 2.0, -1.0);
        let s = Arc::new(symbolic_ilu_k(&a, Ordering::natural(3), 0).unwrap());
        assert!(numeric_lu(s, &a).is_err());
    }

    #[test]
    fn shift_scales_the_diagonal() {
        let a = CsrMatrix::from_diagonal(&[2.0, 4.0]);
        let s = Arc::new(symbolic_ilu_k(&a, Ordering::natural(2), 0).unwrap());
        let f = numeric_ilu_with(s, &a, IluOptions { diagonal_shift: 0.5 }).unwrap();
        assert_eq!(f.u_values(), &[3.0, 6.0]);
    }
}
