//! Fixed-point (Jacobi-sweep) ILU and triangular solves.

use std::sync::Arc;

use rayon::prelude::*;

use super::numeric::{pivot_tolerance, FactorMethod, LocalFactorization};
use super::symbolic::SymbolicFactorization;
use super::trisolve::{check_lengths, TriangularWorkspace, LEVEL_PAR_ROWS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// For every slot of `L` then `U`, the `(L, U)` position pairs whose
/// products make up `Σ_{k < min(i,j)} l_ik u_kj`.
#[derive(Clone, Debug)]
pub(crate) struct FastPlan {
    ptr: Vec<usize>,
    l_pos: Vec<usize>,
    u_pos: Vec<usize>,
    /// Diagonal U slot of the column of each L slot.
    l_diag: Vec<usize>,
}

impl FastPlan {
    fn build(sym: &SymbolicFactorization) -> Self {
        let n = sym.n();
        let (l_ptr, l_idx) = sym.l_pattern();
        let (u_ptr, u_idx) = sym.u_pattern();

        // U by columns: rows ascending with their U slot.
        let mut c_ptr = vec![0; n + 1];
        for &j in u_idx {
            c_ptr[j + 1] += 1;
        }
        for j in 0..n {
            c_ptr[j + 1] += c_ptr[j];
        }
        let mut fill = c_ptr.clone();
        let mut c_row = vec![0; u_idx.len()];
        let mut c_slot = vec![0; u_idx.len()];
        for k in 0..n {
            for q in u_ptr[k]..u_ptr[k + 1] {
                let j = u_idx[q];
                c_row[fill[j]] = k;
                c_slot[fill[j]] = q;
                fill[j] += 1;
            }
        }

        let mut ptr = vec![0];
        let mut l_pos = Vec::new();
        let mut u_pos = Vec::new();
        let mut merge = |i: usize, j: usize, limit: usize| {
            let mut a = l_ptr[i];
            let a_end = l_ptr[i + 1];
            let mut b = c_ptr[j];
            let b_end = c_ptr[j + 1];
            while a < a_end && b < b_end {
                let ka = l_idx[a];
                let kb = c_row[b];
                if ka >= limit || kb >= limit {
                    break;
                }
                match ka.cmp(&kb) {
                    std::cmp::Ordering::Less => a += 1,
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        l_pos.push(a);
                        u_pos.push(c_slot[b]);
                        a += 1;
                        b += 1;
                    }
                }
            }
            ptr.push(l_pos.len());
        };
        let mut l_diag = Vec::with_capacity(l_idx.len());
        for i in 0..n {
            for &j in &l_idx[l_ptr[i]..l_ptr[i + 1]] {
                merge(i, j, j);
                l_diag.push(u_ptr[j]);
            }
        }
        for i in 0..n {
            for &j in &u_idx[u_ptr[i]..u_ptr[i + 1]] {
                merge(i, j, i);
            }
        }
        Self {
            ptr,
            l_pos,
            u_pos,
            l_diag,
        }
    }

    fn partial<T: Scalar>(&self, t: usize, l: &[T], u: &[T]) -> T {
        let mut acc = T::zero();
        for k in self.ptr[t]..self.ptr[t + 1] {
            acc += l[self.l_pos[k]] * u[self.u_pos[k]];
        }
        acc
    }
}

impl SymbolicFactorization {
    pub(crate) fn plan(&self) -> &FastPlan {
        self.fast_plan.get_or_init(|| FastPlan::build(self))
    }
}

/// Fixed-point ILU: `sweeps` synchronous sweeps over every factor entry.
///
/// Starts from `l_ij = a_ij / a_jj`, `U = upper(A)`. Each sweep reads only the
/// previous iterate, so results do not depend on thread count.
pub fn fast_ilu_numeric<T: Scalar>(
    symbolic: Arc<SymbolicFactorization>,
    a: &CsrMatrix<T>,
    sweeps: usize,
    trisolve_iters: usize,
) -> Result<LocalFactorization<T>> {
    if sweeps == 0 {
        return Err(Error::InvalidConfig("fixed-point ILU needs at least one sweep".into()));
    }
    let (a_l, a_u) = symbolic.scatter_values(a)?;
    let n = symbolic.n();
    let (u_ptr, _) = symbolic.u_pattern();
    let tol = pivot_tolerance(a);
    let perm = &symbolic.ordering().perm;
    for i in 0..n {
        let d = a_u[u_ptr[i]];
        if !(d.abs() > tol) {
            return Err(Error::ZeroPivot {
                row: i,
                original: perm[i],
                value: d.as_f64(),
            });
        }
    }
    let plan = symbolic.plan();
    let nnz_l = a_l.len();

    let mut l: Vec<T> = a_l
        .iter()
        .zip(&plan.l_diag)
        .map(|(&v, &d)| v / a_u[d])
        .collect();
    let mut u = a_u.clone();
    let mut l_next = vec![T::zero(); l.len()];
    let mut u_next = vec![T::zero(); u.len()];

    let residual = |l: &[T], u: &[T]| -> f64 {
        let mut r = 0.0;
        for &slot in symbolic.a_slots() {
            let (a, lu) = if slot < nnz_l {
                (a_l[slot], plan.partial(slot, l, u) + l[slot] * u[plan.l_diag[slot]])
            } else {
                let q = slot - nnz_l;
                (a_u[q], plan.partial(slot, l, u) + u[q])
            };
            r += (a - lu).abs().as_f64();
        }
        r
    };
    let mut history = vec![residual(&l, &u)];

    for sweep in 1..=sweeps {
        {
            let (lr, ur) = (&l, &u);
            l_next.par_iter_mut().enumerate().for_each(|(p, out)| {
                *out = (a_l[p] - plan.partial(p, lr, ur)) / ur[plan.l_diag[p]];
            });
            u_next.par_iter_mut().enumerate().for_each(|(q, out)| {
                *out = a_u[q] - plan.partial(nnz_l + q, lr, ur);
            });
        }
        std::mem::swap(&mut l, &mut l_next);
        std::mem::swap(&mut u, &mut u_next);
        if l.iter().chain(u.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIterate { sweep });
        }
        history.push(residual(&l, &u));
    }
    for i in 0..n {
        let d = u[u_ptr[i]];
        if !(d.abs() > tol) {
            return Err(Error::ZeroPivot {
                row: i,
                original: perm[i],
                value: d.as_f64(),
            });
        }
    }

    Ok(LocalFactorization {
        symbolic,
        l,
        u,
        method: FactorMethod::FastIlu {
            sweeps,
            trisolve_iters,
        },
        factor_residuals: history,
    })
}

/// Jacobi iterations on both triangular factors. The first iterate is
/// `D⁻¹ b`, so `iters = 1` applies only the diagonal scaling and each further
/// iteration performs one update. `iters >= n` reproduces substitution.
pub fn fast_trisolve<T: Scalar>(fac: &LocalFactorization<T>, b: &[T], iters: usize) -> Result<Vec<T>> {
    let mut x = vec![T::zero(); fac.n()];
    let mut ws = fac.workspace();
    fast_trisolve_into(fac, b, &mut x, &mut ws, iters)?;
    Ok(x)
}

pub fn fast_trisolve_into<T: Scalar>(
    fac: &LocalFactorization<T>,
    b: &[T],
    x: &mut [T],
    ws: &mut TriangularWorkspace<T>,
    iters: usize,
) -> Result<()> {
    let n = fac.n();
    check_lengths(n, b.len(), x.len())?;
    if iters == 0 {
        return Err(Error::InvalidConfig("triangular iterations must be at least 1".into()));
    }
    ws.ensure(n);
    ws.buf.resize(n, T::zero());
    let sym = &fac.symbolic;
    let perm = &sym.ordering().perm;
    let (l_ptr, l_idx) = sym.l_pattern();
    let (u_ptr, u_idx) = sym.u_pattern();
    let (l, u) = (&fac.l, &fac.u);

    for i in 0..n {
        ws.y[i] = b[perm[i]];
    }
    ws.z.copy_from_slice(&ws.y);
    for _ in 1..iters {
        {
            let (c, old) = (&ws.y, &ws.z);
            let row = |(i, out): (usize, &mut T)| {
                let mut acc = c[i];
                for p in l_ptr[i]..l_ptr[i + 1] {
                    acc -= l[p] * old[l_idx[p]];
                }
                *out = acc;
            };
            if n >= LEVEL_PAR_ROWS {
                ws.buf.par_iter_mut().enumerate().for_each(row);
            } else {
                ws.buf.iter_mut().enumerate().for_each(row);
            }
        }
        std::mem::swap(&mut ws.z, &mut ws.buf);
        if ws.z == ws.buf {
            break;
        }
    }

    std::mem::swap(&mut ws.y, &mut ws.z);
    for i in 0..n {
        ws.z[i] = ws.y[i] / u[u_ptr[i]];
    }
    for _ in 1..iters {
        {
            let (c, old) = (&ws.y, &ws.z);
            let row = |(i, out): (usize, &mut T)| {
                let d = u_ptr[i];
                let mut acc = c[i];
                for q in d + 1..u_ptr[i + 1] {
                    acc -= u[q] * old[u_idx[q]];
                }
                *out = acc / u[d];
            };
            if n >= LEVEL_PAR_ROWS {
                ws.buf.par_iter_mut().enumerate().for_each(row);
            } else {
                ws.buf.iter_mut().enumerate().for_each(row);
            }
        }
        std::mem::swap(&mut ws.z, &mut ws.buf);
        if ws.z == ws.buf {
            break;
        }
    }

    for i in 0..n {
        x[perm[i]] = ws.z[i];
    }
    Ok(())
}
