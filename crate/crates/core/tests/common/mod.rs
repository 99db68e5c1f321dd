#![allow(dead_code)]

use gdsw_core::sparse::CsrMatrix;
use nalgebra::DMatrix;

pub fn to_dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    gdsw_testkit::dense_from_csr(a.nrows(), a.ncols(), a.row_ptr(), a.col_idx(), a.values())
}

pub fn from_triplets(n: usize, m: usize, trip: &[(usize, usize, f64)]) -> CsrMatrix<f64> {
    CsrMatrix::from_triplets(n, m, trip).unwrap()
}

/// Dense matrix of a linear map probed column by column.
pub fn probe(n: usize, mut apply: impl FnMut(&[f64], &mut [f64])) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut y = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        apply(&e, &mut y);
        e[j] = 0.0;
        for i in 0..n {
            m[(i, j)] = y[i];
        }
    }
    m
}
