use rayon::prelude::*;

use super::numeric::LocalFactorization;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Levels with fewer rows than this are processed sequentially.
pub(crate) const LEVEL_PAR_ROWS: usize = 2048;

/// Scratch vectors for triangular solves; reuse across applications.
#[derive(Clone, Debug)]
pub struct TriangularWorkspace<T> {
    pub(crate) y: Vec<T>,
    pub(crate) z: Vec<T>,
    pub(crate) buf: Vec<T>,
}

impl<T: Scalar> TriangularWorkspace<T> {
    pub fn new(n: usize) -> Self {
        Self {
            y: vec![T::zero(); n],
            z: vec![T::zero(); n],
            buf: Vec::with_capacity(n),
        }
    }

    pub(crate) fn ensure(&mut self, n: usize) {
        self.y.resize(n, T::zero());
        self.z.resize(n, T::zero());
    }
}

pub(crate) fn check_lengths(n: usize, b: usize, x: usize) -> Result<()> {
    if b != n {
        return Err(Error::DimensionMismatch {
            op: "triangular solve (rhs)",
            expected: n,
            found: b,
        });
    }
    if x != n {
        return Err(Error::DimensionMismatch {
            op: "triangular solve (solution)",
            expected: n,
            found: x,
        });
    }
    Ok(())
}

/// Forward and backward substitution scheduled by level sets.
///
/// Every row is reduced in storage order, so the result is bitwise equal to
/// plain sequential substitution regardless of thread count.
pub fn trisolve_levelset<T: Scalar>(fac: &LocalFactorization<T>, b: &[T]) -> Result<Vec<T>> {
    let mut x = vec![T::zero(); fac.n()];
    let mut ws = fac.workspace();
    trisolve_levelset_into(fac, b, &mut x, &mut ws)?;
    Ok(x)
}

pub fn trisolve_levelset_into<T: Scalar>(
    fac: &LocalFactorization<T>,
    b: &[T],
    x: &mut [T],
    ws: &mut TriangularWorkspace<T>,
) -> Result<()> {
    let n = fac.n();
    check_lengths(n, b.len(), x.len())?;
    ws.ensure(n);
    let sym = &fac.symbolic;
    let perm = &sym.ordering().perm;
    let (l_ptr, l_idx) = sym.l_pattern();
    let (u_ptr, u_idx) = sym.u_pattern();
    let l = &fac.l;
    let u = &fac.u;
    let y = &mut ws.y;
    let buf = &mut ws.buf;
    for i in 0..n {
        y[i] = b[perm[i]];
    }

    let lower_row = |i: usize, y: &[T]| {
        let mut acc = y[i];
        for p in l_ptr[i]..l_ptr[i + 1] {
            acc -= l[p] * y[l_idx[p]];
        }
        acc
    };
    for rows in sym.lower_levels().iter() {
        if rows.len() >= LEVEL_PAR_ROWS {
            let ys: &[T] = y;
            rows.par_iter().map(|&i| lower_row(i, ys)).collect_into_vec(buf);
            for (&i, &v) in rows.iter().zip(buf.iter()) {
                y[i] = v;
            }
        } else {
            for &i in rows {
                y[i] = lower_row(i, y);
            }
        }
    }

    let upper_row = |i: usize, y: &[T]| {
        let d = u_ptr[i];
        let mut acc = y[i];
        for q in d + 1..u_ptr[i + 1] {
            acc -= u[q] * y[u_idx[q]];
        }
        acc / u[d]
    };
    for rows in sym.upper_levels().iter() {
        if rows.len() >= LEVEL_PAR_ROWS {
            let ys: &[T] = y;
            rows.par_iter().map(|&i| upper_row(i, ys)).collect_into_vec(buf);
            for (&i, &v) in rows.iter().zip(buf.iter()) {
                y[i] = v;
            }
        } else {
            for &i in rows {
                y[i] = upper_row(i, y);
            }
        }
    }

    for i in 0..n {
        x[perm[i]] = y[i];
    }
    Ok(())
}
