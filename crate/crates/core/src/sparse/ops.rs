use rayon::prelude::*;

use super::{CsrMatrix, IndexMap};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Rows per rayon task in [`spmv`]; small products stay sequential.
const SPMV_PAR_ROWS: usize = 4096;

/// `y := alpha * A x + beta * y`
///
/// Each row is reduced in storage order, so the result does not depend on
/// how rows are distributed across threads.
pub fn spmv<T: Scalar>(a: &CsrMatrix<T>, x: &[T], y: &mut [T], alpha: T, beta: T) -> Result<()> {
    if x.len() != a.ncols() {
        return Err(Error::DimensionMismatch {
            op: "spmv (x)",
            expected: a.ncols(),
            found: x.len(),
        });
    }
    if y.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            op: "spmv (y)",
            expected: a.nrows(),
            found: y.len(),
        });
    }
    let row = |i: usize, yi: &mut T| {
        let (cols, vals) = a.row(i);
        let mut acc = T::zero();
        for (&c, &v) in cols.iter().zip(vals) {
            acc += v * x[c];
        }
        *yi = if beta == T::zero() {
            alpha * acc
        } else {
            alpha * acc + beta * *yi
        };
    };
    if a.nrows() >= 2 * SPMV_PAR_ROWS {
        y.par_chunks_mut(SPMV_PAR_ROWS)
            .enumerate()
            .for_each(|(chunk, ys)| {
                let base = chunk * SPMV_PAR_ROWS;
                for (k, yi) in ys.iter_mut().enumerate() {
                    row(base + k, yi);
                }
            });
    } else {
        for (i, yi) in y.iter_mut().enumerate() {
            row(i, yi);
        }
    }
    Ok(())
}

/// `C = A B` (Gustavson). Entries that cancel to zero are kept so the
/// output pattern depends only on the input patterns.
pub fn spgemm<T: Scalar>(a: &CsrMatrix<T>, b: &CsrMatrix<T>) -> Result<CsrMatrix<T>> {
    if a.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            op: "spgemm",
            expected: a.ncols(),
            found: b.nrows(),
        });
    }
    let n = b.ncols();
    let mut marker = vec![usize::MAX; n];
    let mut acc = vec![T::zero(); n];
    let mut row_cols: Vec<usize> = Vec::new();
    let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..a.nrows() {
        row_cols.clear();
        let (acols, avals) = a.row(i);
        for (&k, &av) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(k);
            for (&j, &bv) in bcols.iter().zip(bvals) {
                if marker[j] != i {
                    marker[j] = i;
                    acc[j] = av * bv;
                    row_cols.push(j);
                } else {
                    acc[j] += av * bv;
                }
            }
        }
        row_cols.sort_unstable();
        for &j in &row_cols {
            col_idx.push(j);
            values.push(acc[j]);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(CsrMatrix::from_parts(a.nrows(), n, row_ptr, col_idx, values))
}

/// `Aᵀ` in canonical form (counting sort by column, rows visited in order).
pub fn transpose<T: Scalar>(a: &CsrMatrix<T>) -> CsrMatrix<T> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut row_ptr = vec![0usize; n + 1];
    for &c in a.col_idx() {
        row_ptr[c + 1] += 1;
    }
    for j in 0..n {
        row_ptr[j + 1] += row_ptr[j];
    }
    let mut next = row_ptr.clone();
    let mut col_idx = vec![0usize; a.nnz()];
    let mut values = vec![T::zero(); a.nnz()];
    for i in 0..m {
        let (cols, vals) = a.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            let p = next[c];
            col_idx[p] = i;
            values[p] = v;
            next[c] += 1;
        }
    }
    CsrMatrix::from_parts(n, m, row_ptr, col_idx, values)
}

/// `R_rows A R_colsᵀ` by index gathering: entry `(i, j)` of the result is
/// `A(rows[i], cols[j])`.
pub fn extract_submatrix<T: Scalar>(
    a: &CsrMatrix<T>,
    rows: &IndexMap,
    cols: &IndexMap,
) -> Result<CsrMatrix<T>> {
    if let Some(r) = rows.max_index().filter(|&r| r >= a.nrows()) {
        return Err(Error::IndexOutOfRange {
            index: r,
            bound: a.nrows(),
        });
    }
    if let Some(c) = cols.max_index().filter(|&c| c >= a.ncols()) {
        return Err(Error::IndexOutOfRange {
            index: c,
            bound: a.ncols(),
        });
    }
    let mut local = vec![usize::MAX; a.ncols()];
    for (k, g) in cols.iter().enumerate() {
        local[g] = k;
    }
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for g in rows.iter() {
        let (acols, avals) = a.row(g);
        // cols is sorted, so local column order follows global order.
        for (&c, &v) in acols.iter().zip(avals) {
            let l = local[c];
            if l != usize::MAX {
                col_idx.push(l);
                values.push(v);
            }
        }
        row_ptr.push(col_idx.len());
    }
    Ok(CsrMatrix::from_parts(
        rows.len(),
        cols.len(),
        row_ptr,
        col_idx,
        values,
    ))
}

/// Rounds every value to the nearest single-precision number.
pub fn convert_precision(a: &CsrMatrix<f64>) -> Result<CsrMatrix<f32>> {
    a.cast::<f32>()
}

/// `P A Pᵀ` with `result(i, j) = A(perm[i], perm[j])`.
pub fn permute_symmetric<T: Scalar>(a: &CsrMatrix<T>, perm: &[usize]) -> Result<CsrMatrix<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            op: "permute_symmetric (square)",
            expected: n,
            found: a.ncols(),
        });
    }
    let inv = inverse_permutation(perm, n)?;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    let mut scratch: Vec<(usize, T)> = Vec::new();
    row_ptr.push(0);
    for &old in perm {
        let (cols, vals) = a.row(old);
        scratch.clear();
        scratch.extend(cols.iter().zip(vals).map(|(&c, &v)| (inv[c], v)));
        scratch.sort_unstable_by_key(|e| e.0);
        for &(c, v) in &scratch {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    Ok(CsrMatrix::from_parts(n, n, row_ptr, col_idx, values))
}

/// Validates `perm` as a permutation of `0..n` and returns its inverse.
pub(crate) fn inverse_permutation(perm: &[usize], n: usize) -> Result<Vec<usize>> {
    if perm.len() != n {
        return Err(Error::NotAPermutation(n));
    }
    let mut inv = vec![usize::MAX; n];
    for (new, &old) in perm.iter().enumerate() {
        if old >= n || inv[old] != usize::MAX {
            return Err(Error::NotAPermutation(n));
        }
        inv[old] = new;
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap1d(n: usize) -> CsrMatrix<f64> {
        CsrMatrix::tridiagonal(n, -1.0, 2.0, -1.0)
    }

    #[test]
    fn spmv_identity() {
        let a = CsrMatrix::<f64>::identity(3);
        let mut y = vec![0.0; 3];
        spmv(&a, &[1.0, 2.0, 3.0], &mut y, 1.0, 0.0).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_laplacian_on_constant() {
        let mut y = vec![0.0; 3];
        spmv(&lap1d(3), &[1.0; 3], &mut y, 1.0, 0.0).unwrap();
        assert_eq!(y, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn spmv_alpha_beta() {
        let mut y = vec![1.0; 3];
        spmv(&lap1d(3), &[1.0; 3], &mut y, 2.0, -1.0).unwrap();
        assert_eq!(y, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let mut y = vec![0.0; 3];
        assert!(matches!(
            spmv(&lap1d(3), &[1.0; 2], &mut y, 1.0, 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut y2 = vec![0.0; 2];
        assert!(spmv(&lap1d(3), &[1.0; 3], &mut y2, 1.0, 0.0).is_err());
    }

    #[test]
    fn spgemm_hand_product() {
        let a = CsrMatrix::from_dense(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let b = CsrMatrix::from_dense(2, 2, &[1.0, 0.0, 3.0, 1.0]);
        let c = spgemm(&a, &b).unwrap();
        assert_eq!(c.to_dense(), vec![7.0, 2.0, 3.0, 1.0]);
    }

    #[test]
    fn spgemm_identity_is_bit_identical() {
        let b = CsrMatrix::from_dense(3, 2, &[0.1, 0.0, 0.0, -2.5, 1e-300, 7.0]);
        let c = spgemm(&CsrMatrix::identity(3), &b).unwrap();
        assert_eq!(c, b);
    }

    #[test]
    fn spgemm_keeps_cancelled_entries() {
        let a = CsrMatrix::from_dense(1, 2, &[1.0, 1.0]);
        let b = CsrMatrix::from_dense(2, 1, &[1.0, -1.0]);
        let c = spgemm(&a, &b).unwrap();
        assert_eq!(c.nnz(), 1);
        assert_eq!(c.values(), &[0.0]);
    }

    #[test]
    fn spgemm_dimension_mismatch() {
        assert!(spgemm(&lap1d(3), &lap1d(4)).is_err());
    }

    #[test]
    fn transpose_examples() {
        let d = CsrMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(transpose(&d), d);
        let a = CsrMatrix::from_triplets(2, 3, &[(0, 2, 5.0)]).unwrap();
        let t = transpose(&a);
        assert_eq!((t.nrows(), t.ncols()), (3, 2));
        assert_eq!(t.get(2, 0), 5.0);
        assert_eq!(t.nnz(), 1);
    }

    #[test]
    fn extract_full_and_principal() {
        let a = lap1d(5);
        let all = IndexMap::full(5);
        assert_eq!(extract_submatrix(&a, &all, &all).unwrap(), a);
        let head = IndexMap::new(vec![0, 1, 2]).unwrap();
        assert_eq!(extract_submatrix(&a, &head, &head).unwrap(), lap1d(3));
    }

    #[test]
    fn extract_out_of_range() {
        let bad = IndexMap::new(vec![0, 7]).unwrap();
        assert!(matches!(
            extract_submatrix(&lap1d(5), &bad, &IndexMap::full(5)),
            Err(Error::IndexOutOfRange { index: 7, .. })
        ));
    }

    #[test]
    fn convert_precision_examples() {
        let a = CsrMatrix::from_diagonal(&[0.5, 1.0, -2.0]);
        let s = convert_precision(&a).unwrap();
        assert_eq!(s.values(), &[0.5f32, 1.0, -2.0]);
        let b = CsrMatrix::from_diagonal(&[1.0 + 2f64.powi(-30)]);
        assert_eq!(convert_precision(&b).unwrap().values(), &[1.0f32]);
    }

    #[test]
    fn permute_examples() {
        let a = lap1d(3);
        assert_eq!(permute_symmetric(&a, &[0, 1, 2]).unwrap(), a);
        assert_eq!(permute_symmetric(&a, &[2, 1, 0]).unwrap(), a);
        assert!(matches!(
            permute_symmetric(&a, &[0, 0, 1]),
            Err(Error::NotAPermutation(3))
        ));
        assert!(permute_symmetric(&a, &[0, 1]).is_err());
    }
}
