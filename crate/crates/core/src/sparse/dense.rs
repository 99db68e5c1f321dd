use crate::scalar::Scalar;

/// Column-major dense block (null-space bases, Krylov bases, small blocks of
/// coarse basis values).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseColumnBlock<T> {
    nrows: usize,
    ncols: usize,
    values: Vec<T>,
}

impl<T: Scalar> DenseColumnBlock<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            values: vec![T::zero(); nrows * ncols],
        }
    }

    /// Panics if `values.len() != nrows * ncols`.
    pub fn from_column_major(nrows: usize, ncols: usize, values: Vec<T>) -> Self {
        assert_eq!(values.len(), nrows * ncols, "column block size mismatch");
        Self {
            nrows,
            ncols,
            values,
        }
    }

    /// All columns must have the same length.
    pub fn from_columns(nrows: usize, columns: Vec<Vec<T>>) -> Self {
        let ncols = columns.len();
        let mut values = Vec::with_capacity(nrows * ncols);
        for c in columns {
            assert_eq!(c.len(), nrows, "column length mismatch");
            values.extend(c);
        }
        Self {
            nrows,
            ncols,
            values,
        }
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
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.values[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.values[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.values[j * self.nrows + i] = v;
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }

    /// Largest column 2-norm.
    pub fn max_column_norm(&self) -> T {
        (0..self.ncols)
            .map(|j| self.column(j).iter().map(|&v| v * v).sum::<T>().sqrt())
            .fold(T::zero(), T::max)
    }

    pub fn cast<U: Scalar>(&self) -> DenseColumnBlock<U> {
        DenseColumnBlock {
            nrows: self.nrows,
            ncols: self.ncols,
            values: self.values.iter().map(|v| U::of_f64(v.as_f64())).collect(),
        }
    }
}
