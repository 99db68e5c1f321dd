use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sparse matrix in canonical CSR form: column indices strictly increasing
/// within each row, no duplicates, `row_ptr[nrows] == nnz`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Validates the arrays and returns the matrix if they are in canonical form.
    pub fn try_new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return Err(Error::InvalidStructure(format!(
                "row_ptr has length {} for {} rows",
                row_ptr.len(),
                nrows
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidStructure("row_ptr[0] != 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return Err(Error::InvalidStructure(format!(
                "row_ptr[nrows] = {}, {} column indices, {} values",
                row_ptr[nrows],
                col_idx.len(),
                values.len()
            )));
        }
        for i in 0..nrows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidStructure(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= ncols {
                    return Err(Error::IndexOutOfRange {
                        index: c,
                        bound: ncols,
                    });
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::InvalidStructure(format!(
                        "row {i} is not strictly increasing"
                    )));
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Kernel-internal constructor; canonical form is checked in debug builds.
    pub(crate) fn from_parts(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Self {
        let m = Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        };
        debug_assert!(m.is_canonical(), "kernel produced non-canonical CSR");
        m
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_parts(nrows, ncols, vec![0; nrows + 1], Vec::new(), Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts(
            n,
            n,
            (0..=n).collect(),
            (0..n).collect(),
            vec![T::one(); n],
        )
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_parts(n, n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    /// Tridiagonal Toeplitz matrix with constant sub/main/super diagonals.
    pub fn tridiagonal(n: usize, sub: T, main: T, sup: T) -> Self {
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(3 * n);
        let mut values = Vec::with_capacity(3 * n);
        row_ptr.push(0);
        for i in 0..n {
            if i > 0 {
                col_idx.push(i - 1);
                values.push(sub);
            }
            col_idx.push(i);
            values.push(main);
            if i + 1 < n {
                col_idx.push(i + 1);
                values.push(sup);
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts(n, n, row_ptr, col_idx, values)
    }

    /// Builds a canonical matrix from `(row, col, value)` triplets in any
    /// order. Duplicates are summed in input order.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    bound: nrows,
                });
            }
            if c >= ncols {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    bound: ncols,
                });
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        // Bucket by row (stable), then sort each row by column and merge.
        let mut next = counts.clone();
        let mut order = vec![0usize; triplets.len()];
        for (k, &(r, _, _)) in triplets.iter().enumerate() {
            order[next[r]] = k;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for i in 0..nrows {
            let bucket = &mut order[counts[i]..counts[i + 1]];
            bucket.sort_by_key(|&k| (triplets[k].1, k));
            for &k in bucket.iter() {
                let (_, c, v) = triplets[k];
                if col_idx.len() > row_ptr[i] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self::from_parts(nrows, ncols, row_ptr, col_idx, values))
    }

    /// Converts a row-major dense array, keeping only nonzero entries.
    pub fn from_dense(nrows: usize, ncols: usize, data: &[T]) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..nrows {
            for j in 0..ncols {
                let v = data[i * ncols + j];
                if v != T::zero() {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self::from_parts(nrows, ncols, row_ptr, col_idx, values)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.nrows * self.ncols];
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[i * self.ncols + c] = v;
            }
        }
        out
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    #[inline]
    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    #[inline]
    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Mutable access to the values; the pattern stays fixed.
    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    /// Position of `(i, j)` in the value array, if stored.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let s = self.row_ptr[i];
        self.col_idx[s..self.row_ptr[i + 1]]
            .binary_search(&j)
            .ok()
            .map(|k| s + k)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.find(i, j).map_or(T::zero(), |k| self.values[k])
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.nrows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }

    pub fn scale(&mut self, s: T) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `true` when both matrices share dimensions and sparsity pattern.
    pub fn same_pattern<U>(&self, other: &CsrMatrix<U>) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    pub fn is_structurally_symmetric(&self) -> bool {
        if self.nrows != self.ncols {
            return false;
        }
        (0..self.nrows).all(|i| self.row(i).0.iter().all(|&j| self.find(j, i).is_some()))
    }

    pub fn is_canonical(&self) -> bool {
        self.row_ptr.len() == self.nrows + 1
            && self.row_ptr[0] == 0
            && self.row_ptr[self.nrows] == self.col_idx.len()
            && self.col_idx.len() == self.values.len()
            && (0..self.nrows).all(|i| {
                self.row_ptr[i] <= self.row_ptr[i + 1] && {
                    let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
                    cols.windows(2).all(|w| w[0] < w[1])
                        && cols.iter().all(|&c| c < self.ncols)
                }
            })
    }

    /// `y = A x` into a fresh vector.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        super::spmv(self, x, &mut y, T::one(), T::zero()).expect("mul_vec dimension mismatch");
        y
    }

    /// Copies the matrix into another element precision, failing if a finite
    /// value does not fit the target type.
    pub fn cast<U: Scalar>(&self) -> Result<CsrMatrix<U>> {
        let mut values = Vec::with_capacity(self.values.len());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let u = U::of_f64(v.as_f64());
                if v.is_finite() && !u.is_finite() {
                    return Err(Error::PrecisionOverflow { row: i, col: c });
                }
                values.push(u);
            }
        }
        Ok(CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values,
        })
    }

    /// Drops the values, keeping only the pattern (all stored values set to one).
    pub fn pattern(&self) -> CsrMatrix<T> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: vec![T::one(); self.values.len()],
        }
    }

    /// Pattern of `A + Aᵀ` with `A`'s values and explicit zeros where only
    /// `Aᵀ` has an entry.
    pub fn symmetrize_pattern(&self) -> CsrMatrix<T> {
        assert_eq!(self.nrows, self.ncols);
        if self.is_structurally_symmetric() {
            return self.clone();
        }
        let mut trip: Vec<(usize, usize, T)> = Vec::with_capacity(2 * self.nnz());
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                trip.push((i, j, v));
                trip.push((j, i, T::zero()));
            }
        }
        CsrMatrix::from_triplets(self.nrows, self.ncols, &trip).expect("indices in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn try_new_rejects_unsorted_rows() {
        let err = CsrMatrix::<f64>::try_new(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]);
        assert!(matches!(err, Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn try_new_rejects_bad_row_ptr() {
        assert!(CsrMatrix::<f64>::try_new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::<f64>::try_new(2, 2, vec![0, 2, 1], vec![0, 1], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::<f64>::try_new(1, 2, vec![0, 1], vec![5], vec![1.0]).is_err());
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 0), 4.0);
        assert!(a.is_canonical());
    }

    #[test]
    fn cast_overflow_reports_position() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 1, 1e300)]).unwrap();
        match a.cast::<f32>() {
            Err(Error::PrecisionOverflow { row, col }) => assert_eq!((row, col), (1, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn symmetrize_adds_explicit_zeros() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        let s = a.symmetrize_pattern();
        assert!(s.is_structurally_symmetric());
        assert_eq!(s.get(0, 1), 0.0);
        assert_eq!(s.nnz(), 4);
    }
}
