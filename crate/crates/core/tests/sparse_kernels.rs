mod common;

use common::{from_triplets, to_dense};
use gdsw_core::sparse::{
    extract_submatrix, matrix_market, permute_symmetric, spgemm, spmv, transpose, CsrMatrix,
    IndexMap,
};
use gdsw_testkit as tk;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn random_csr(seed: u64, n: usize, m: usize, density: f64) -> CsrMatrix<f64> {
    let mut rng = tk::rng(seed);
    from_triplets(n, m, &tk::random_sparse(&mut rng, n, m, density))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spmv_matches_dense(seed in any::<u64>(), n in 1usize..30, m in 1usize..30, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let a = random_csr(seed, n, m, 0.3);
        let mut rng = tk::rng(seed ^ 1);
        let x = tk::random_vec(&mut rng, m);
        let y0 = tk::random_vec(&mut rng, n);
        let mut y = y0.clone();
        spmv(&a, &x, &mut y, alpha, beta).unwrap();
        let ax = tk::matvec(&to_dense(&a), &x);
        let expect: Vec<f64> = ax.iter().zip(&y0).map(|(u, v)| alpha * u + beta * v).collect();
        prop_assert!(tk::max_abs_diff(&y, &expect) <= 1e-13 * (1.0 + expect.iter().fold(0.0f64, |s, v| s.max(v.abs()))));
    }

    #[test]
    fn spgemm_matches_dense(seed in any::<u64>(), n in 1usize..20, k in 1usize..20, m in 1usize..20) {
        let a = random_csr(seed, n, k, 0.3);
        let b = random_csr(seed.wrapping_add(7), k, m, 0.3);
        let c = spgemm(&a, &b).unwrap();
        prop_assert!(c.is_canonical());
        let expect = to_dense(&a) * to_dense(&b);
        prop_assert!((to_dense(&c) - &expect).abs().max() <= 1e-13);
        // Pattern: exactly the structural product.
        for i in 0..n {
            for j in 0..m {
                let structural = a.row(i).0.iter().any(|&p| b.find(p, j).is_some());
                prop_assert_eq!(c.find(i, j).is_some(), structural);
            }
        }
    }

    #[test]
    fn transpose_matches_dense(seed in any::<u64>(), n in 1usize..25, m in 1usize..25) {
        let a = random_csr(seed, n, m, 0.25);
        let t = transpose(&a);
        prop_assert!(t.is_canonical());
        prop_assert_eq!(to_dense(&t), to_dense(&a).transpose());
        prop_assert_eq!(transpose(&t).to_dense(), a.to_dense());
    }

    #[test]
    fn extract_matches_dense(seed in any::<u64>(), n in 2usize..25) {
        let a = random_csr(seed, n, n, 0.3);
        let mut rng = tk::rng(seed ^ 3);
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        let rows = IndexMap::from_unsorted(rows[..n / 2 + 1].to_vec());
        let mut cols: Vec<usize> = (0..n).collect();
        cols.shuffle(&mut rng);
        let cols = IndexMap::from_unsorted(cols[..n / 3 + 1].to_vec());
        let s = extract_submatrix(&a, &rows, &cols).unwrap();
        let expect = tk::submatrix(&to_dense(&a), rows.as_slice(), cols.as_slice());
        prop_assert_eq!(to_dense(&s), expect);
    }

    #[test]
    fn permute_matches_dense(seed in any::<u64>(), n in 1usize..25) {
        let a = random_csr(seed, n, n, 0.3);
        let mut rng = tk::rng(seed ^ 5);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let p = permute_symmetric(&a, &perm).unwrap();
        prop_assert!(p.is_canonical());
        prop_assert_eq!(to_dense(&p), tk::permute(&to_dense(&a), &perm));
    }

    #[test]
    fn gather_scatter_are_adjoint(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = tk::rng(seed);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let map = IndexMap::from_unsorted(idx[..(n + 1) / 2].to_vec());
        let x = tk::random_vec(&mut rng, n);
        let y = tk::random_vec(&mut rng, map.len());
        let mut rx = vec![0.0; map.len()];
        map.gather(&x, &mut rx);
        let mut ry = vec![0.0; n];
        map.scatter_add(&y, &mut ry);
        let lhs: f64 = rx.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&ry).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}

#[test]
fn spgemm_keeps_cancelled_entries() {
    let a = CsrMatrix::from_dense(1, 2, &[1.0, 1.0]);
    let b = CsrMatrix::from_dense(2, 1, &[1.0, -1.0]);
    let c = spgemm(&a, &b).unwrap();
    assert_eq!(c.nnz(), 1);
    assert_eq!(c.get(0, 0), 0.0);
}

#[test]
fn precision_round_trip_is_close() {
    let a = random_csr(11, 20, 20, 0.3);
    let s = gdsw_core::sparse::convert_precision(&a).unwrap();
    assert!(s.same_pattern(&a));
    for (x, y) in a.values().iter().zip(s.values()) {
        assert!((x - *y as f64).abs() <= 1e-7 * x.abs());
    }
    let big = CsrMatrix::from_diagonal(&[1e300]);
    assert!(gdsw_core::sparse::convert_precision(&big).is_err());
}

#[test]
fn matrix_market_round_trip() {
    let a = random_csr(12, 9, 7, 0.4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    matrix_market::write_csr(std::fs::File::create(&path).unwrap(), &a).unwrap();
    let b = matrix_market::read_csr(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(a, b);
}
