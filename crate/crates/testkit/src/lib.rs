//! Dense brute-force oracles and random instance generators.
//!
//! Nothing here depends on `gdsw-core`; matrices travel as triplet lists or
//! row-major `nalgebra` matrices so tests compare two independent
//! implementations.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Triplets = Vec<(usize, usize, f64)>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dense matrix from triplets; duplicates are summed.
pub fn dense(nrows: usize, ncols: usize, trip: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nrows, ncols);
    for &(i, j, v) in trip {
        m[(i, j)] += v;
    }
    m
}

/// Dense matrix from CSR arrays.
pub fn dense_from_csr(
    nrows: usize,
    ncols: usize,
    row_ptr: &[usize],
    col_idx: &[usize],
    values: &[f64],
) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nrows, ncols);
    for i in 0..nrows {
        for p in row_ptr[i]..row_ptr[i + 1] {
            m[(i, col_idx[p])] += values[p];
        }
    }
    m
}

pub fn matvec(a: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (a * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// `B(i, j) = A(perm[i], perm[j])`.
pub fn permute(a: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
    let n = perm.len();
    DMatrix::from_fn(n, n, |i, j| a[(perm[i], perm[j])])
}

/// Rows and columns of `a` selected by the given index lists.
pub fn submatrix(a: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

/// Doolittle LU without pivoting: `A = L U`, `L` unit lower.
pub fn lu_nopivot(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut u = a.clone();
    let mut l = DMatrix::identity(n, n);
    for k in 0..n {
        for i in k + 1..n {
            let f = u[(i, k)] / u[(k, k)];
            l[(i, k)] = f;
            for j in k..n {
                u[(i, j)] -= f * u[(k, j)];
            }
        }
    }
    (l, u)
}

/// ILU restricted to `pattern` (IKJ variant), returning `L` (unit) and `U`.
pub fn ilu_dense(a: &DMatrix<f64>, pattern: &[Vec<bool>]) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut w = a.clone();
    for i in 0..n {
        for j in 0..n {
            if !pattern[i][j] {
                w[(i, j)] = 0.0;
            }
        }
    }
    for i in 1..n {
        for k in 0..i {
            if !pattern[i][k] {
                continue;
            }
            w[(i, k)] /= w[(k, k)];
            for j in k + 1..n {
                if pattern[i][j] {
                    w[(i, j)] -= w[(i, k)] * w[(k, j)];
                }
            }
        }
    }
    let l = DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Greater => w[(i, j)],
        std::cmp::Ordering::Equal => 1.0,
        std::cmp::Ordering::Less => 0.0,
    });
    let u = DMatrix::from_fn(n, n, |i, j| if i <= j { w[(i, j)] } else { 0.0 });
    (l, u)
}

/// Boolean pattern with the diagonal always set.
pub fn pattern_of(a: &DMatrix<f64>) -> Vec<Vec<bool>> {
    let n = a.nrows();
    (0..n)
        .map(|i| (0..n).map(|j| i == j || a[(i, j)] != 0.0).collect())
        .collect()
}

/// Pattern of the exact LU factors by dense symbolic elimination.
pub fn symbolic_fill(pattern: &[Vec<bool>]) -> Vec<Vec<bool>> {
    fill_levels(pattern, usize::MAX)
        .into_iter()
        .map(|row| row.into_iter().map(|l| l != usize::MAX).collect())
        .collect()
}

/// Level of fill of every entry for ILU(`k`); `usize::MAX` marks dropped.
pub fn fill_levels(pattern: &[Vec<bool>], k: usize) -> Vec<Vec<usize>> {
    let n = pattern.len();
    let mut lev: Vec<Vec<usize>> = pattern
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, &b)| if b || i == j { 0 } else { usize::MAX })
                .collect()
        })
        .collect();
    for i in 0..n {
        for kk in 0..i {
            let lik = lev[i][kk];
            if lik > k {
                continue;
            }
            for j in kk + 1..n {
                let lkj = lev[kk][j];
                if lkj > k {
                    continue;
                }
                let nl = lik.saturating_add(lkj).saturating_add(1);
                if nl <= k && nl < lev[i][j] {
                    lev[i][j] = nl;
                }
            }
        }
        for j in 0..n {
            if lev[i][j] > k {
                lev[i][j] = usize::MAX;
            }
        }
    }
    lev
}

/// Forward substitution with a lower-triangular matrix (diagonal used).
pub fn lower_solve(l: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            x[i] -= l[(i, j)] * x[j];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// Backward substitution with an upper-triangular matrix.
pub fn upper_solve(u: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= u[(i, j)] * x[j];
        }
        x[i] /= u[(i, i)];
    }
    x
}

/// Dense solve with partial pivoting.
pub fn solve(a: &DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    a.clone()
        .lu()
        .solve(&DVector::from_column_slice(b))
        .map(|x| x.as_slice().to_vec())
}

pub fn inverse(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().try_inverse()
}

pub fn is_spd(a: &DMatrix<f64>) -> bool {
    a.clone().cholesky().is_some()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.as_slice().to_vec();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Hop distance from `sources` in an adjacency-list graph (`usize::MAX` if unreachable).
pub fn bfs_distances(adj: &[Vec<usize>], sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == usize::MAX {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Adjacency lists (no self loops) of a dense matrix's symmetrized pattern.
pub fn adjacency(a: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && (a[(i, j)] != 0.0 || a[(j, i)] != 0.0))
                .collect()
        })
        .collect()
}

/// Random sparse matrix with roughly `density · nrows · ncols` entries in `[-1, 1]`.
pub fn random_sparse(rng: &mut impl Rng, nrows: usize, ncols: usize, density: f64) -> Triplets {
    let mut trip = Vec::new();
    for i in 0..nrows {
        for j in 0..ncols {
            if rng.gen_bool(density) {
                trip.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    trip
}

/// Random structurally symmetric, strictly diagonally dominant matrix.
/// Values are nonsymmetric unless `symmetric` is set.
pub fn random_dominant(rng: &mut impl Rng, n: usize, density: f64, symmetric: bool) -> Triplets {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                let v = rng.gen_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = if symmetric { v } else { rng.gen_range(-1.0..1.0) };
            }
        }
    }
    let mut trip = Vec::new();
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
        m[(i, i)] = off + 1.0 + rng.gen_range(0.0..1.0);
        for j in 0..n {
            if i == j || m[(i, j)] != 0.0 {
                trip.push((i, j, m[(i, j)]));
            }
        }
    }
    trip
}

/// 5-point Laplacian on an `nx × ny` grid with Dirichlet ghost layer.
pub fn laplace2d(nx: usize, ny: usize) -> Triplets {
    let mut trip = Vec::new();
    let id = |i: usize, j: usize| i + nx * j;
    for j in 0..ny {
        for i in 0..nx {
            let r = id(i, j);
            trip.push((r, r, 4.0));
            if i > 0 {
                trip.push((r, id(i - 1, j), -1.0));
            }
            if i + 1 < nx {
                trip.push((r, id(i + 1, j), -1.0));
            }
            if j > 0 {
                trip.push((r, id(i, j - 1), -1.0));
            }
            if j + 1 < ny {
                trip.push((r, id(i, j + 1), -1.0));
            }
        }
    }
    trip
}

pub fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `max |a - b| / max(max |b|, tiny)`.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    max_abs_diff(a, b) / scale
}

pub fn mat_rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    rel_diff(a.as_slice(), b.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_reconstructs() {
        let mut r = rng(1);
        let a = dense(6, 6, &random_dominant(&mut r, 6, 0.5, false));
        let (l, u) = lu_nopivot(&a);
        assert!(mat_rel_diff(&(l * u), &a) < 1e-14);
    }

    #[test]
    fn full_level_fill_equals_symbolic() {
        let mut r = rng(2);
        let a = dense(10, 10, &random_dominant(&mut r, 10, 0.2, false));
        let p = pattern_of(&a);
        let f = symbolic_fill(&p);
        let l = fill_levels(&p, 100);
        for i in 0..10 {
            for j in 0..10 {
                assert_eq!(f[i][j], l[i][j] != usize::MAX);
            }
        }
    }

    #[test]
    fn ilu_with_full_fill_is_lu() {
        let mut r = rng(3);
        let a = dense(8, 8, &random_dominant(&mut r, 8, 0.3, false));
        let p = symbolic_fill(&pattern_of(&a));
        let (l1, u1) = ilu_dense(&a, &p);
        let (l2, u2) = lu_nopivot(&a);
        assert!(mat_rel_diff(&l1, &l2) < 1e-13);
        assert!(mat_rel_diff(&u1, &u2) < 1e-13);
    }
}
