use std::sync::OnceLock;

use super::fast::FastPlan;
use super::ordering::Ordering;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::CsrMatrix;

/// How much fill the symbolic phase admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FillLevel {
    /// Complete fill: the pattern of the exact LU factors.
    Exact,
    /// ILU(k): entries whose level of fill is at most `k`.
    Level(usize),
}

impl FillLevel {
    fn max_level(self) -> usize {
        match self {
            FillLevel::Exact => usize::MAX,
            FillLevel::Level(k) => k,
        }
    }
}

/// Rows grouped by dependency depth. Rows within one level are independent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSchedule {
    ptr: Vec<usize>,
    rows: Vec<usize>,
}

impl LevelSchedule {
    fn from_depths(depth: &[usize]) -> Self {
        let nlev = depth.iter().map(|&d| d + 1).max().unwrap_or(0);
        let mut ptr = vec![0; nlev + 1];
        for &d in depth {
            ptr[d + 1] += 1;
        }
        for l in 0..nlev {
            ptr[l + 1] += ptr[l];
        }
        let mut fill = ptr.clone();
        let mut rows = vec![0; depth.len()];
        for (i, &d) in depth.iter().enumerate() {
            rows[fill[d]] = i;
            fill[d] += 1;
        }
        Self { ptr, rows }
    }

    pub fn num_levels(&self) -> usize {
        self.ptr.len().saturating_sub(1)
    }

    pub fn level(&self, l: usize) -> &[usize] {
        &self.rows[self.ptr[l]..self.ptr[l + 1]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.num_levels()).map(move |l| self.level(l))
    }
}

/// Output of the symbolic phase. Depends only on the pattern of `A`, the
/// ordering and the fill level, so it can be reused for any matrix with the
/// same pattern.
///
/// Factors are stored in the permuted numbering: `L` strictly lower with unit
/// diagonal implied, `U` upper with the diagonal as the first entry of each row.
#[derive(Clone, Debug)]
pub struct SymbolicFactorization {
    n: usize,
    ordering: Ordering,
    fill: FillLevel,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    lower: LevelSchedule,
    upper: LevelSchedule,
    a_row_ptr: Vec<usize>,
    a_col_idx: Vec<usize>,
    /// Slot of every stored entry of `A`: `< nnz_l` is an L position,
    /// otherwise `nnz_l + ` a U position.
    a_slots: Vec<usize>,
    pub(crate) fast_plan: OnceLock<FastPlan>,
}

/// Symbolic phase for the exact LU factors.
pub fn symbolic_lu<T: Scalar>(a: &CsrMatrix<T>, ordering: Ordering) -> Result<SymbolicFactorization> {
    SymbolicFactorization::new(a, ordering, FillLevel::Exact)
}

/// Symbolic phase for ILU(k). `k = 0` reproduces the pattern of `A`.
pub fn symbolic_ilu_k<T: Scalar>(
    a: &CsrMatrix<T>,
    ordering: Ordering,
    k: usize,
) -> Result<SymbolicFactorization> {
    SymbolicFactorization::new(a, ordering, FillLevel::Level(k))
}

const END: usize = usize::MAX;

impl SymbolicFactorization {
    pub fn new<T: Scalar>(a: &CsrMatrix<T>, ordering: Ordering, fill: FillLevel) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                op: "symbolic factorization (square)",
                expected: n,
                found: a.ncols(),
            });
        }
        if ordering.len() != n {
            return Err(Error::DimensionMismatch {
                op: "symbolic factorization (ordering)",
                expected: n,
                found: ordering.len(),
            });
        }
        let kmax = fill.max_level();
        let perm = &ordering.perm;
        let inv = &ordering.inverse_perm;

        let mut l_ptr = vec![0];
        let mut l_idx = Vec::new();
        let mut u_ptr = vec![0];
        let mut u_idx = Vec::new();
        let mut u_lev: Vec<usize> = Vec::new();

        // Sorted linked list of the current row; `n` is the head sentinel.
        let mut next = vec![END; n + 1];
        let mut lev = vec![0usize; n];
        let mut in_row = vec![END; n];
        let mut init: Vec<usize> = Vec::new();

        for i in 0..n {
            init.clear();
            init.extend(a.row(perm[i]).0.iter().map(|&c| inv[c]));
            init.push(i);
            init.sort_unstable();
            init.dedup();
            let mut prev = n;
            for &c in &init {
                next[prev] = c;
                prev = c;
                lev[c] = 0;
                in_row[c] = i;
            }
            next[prev] = END;

            let mut j = next[n];
            while j < i {
                let lij = lev[j];
                if lij < kmax {
                    let mut hint = j;
                    for q in u_ptr[j] + 1..u_ptr[j + 1] {
                        let nl = lij.saturating_add(u_lev[q]).saturating_add(1);
                        if nl > kmax {
                            continue;
                        }
                        let m = u_idx[q];
                        while next[hint] < m {
                            hint = next[hint];
                        }
                        if in_row[m] == i {
                            lev[m] = lev[m].min(nl);
                        } else {
                            next[m] = next[hint];
                            next[hint] = m;
                            lev[m] = nl;
                            in_row[m] = i;
                        }
                        hint = m;
                    }
                }
                j = next[j];
            }

            let mut c = next[n];
            while c != END {
                if c < i {
                    l_idx.push(c);
                } else {
                    u_idx.push(c);
                    u_lev.push(lev[c]);
                }
                c = next[c];
            }
            l_ptr.push(l_idx.len());
            u_ptr.push(u_idx.len());
        }

        let mut depth = vec![0usize; n];
        for i in 0..n {
            depth[i] = l_idx[l_ptr[i]..l_ptr[i + 1]]
                .iter()
                .map(|&j| depth[j] + 1)
                .max()
                .unwrap_or(0);
        }
        let lower = LevelSchedule::from_depths(&depth);
        for i in (0..n).rev() {
            depth[i] = u_idx[u_ptr[i] + 1..u_ptr[i + 1]]
                .iter()
                .map(|&j| depth[j] + 1)
                .max()
                .unwrap_or(0);
        }
        let upper = LevelSchedule::from_depths(&depth);

        let nnz_l = l_idx.len();
        let mut a_slots = vec![0; a.nnz()];
        for r in 0..n {
            let i = inv[r];
            let start = a.row_ptr()[r];
            for (k, &c) in a.row(r).0.iter().enumerate() {
                let j = inv[c];
                a_slots[start + k] = if j < i {
                    let row = &l_idx[l_ptr[i]..l_ptr[i + 1]];
                    l_ptr[i] + row.binary_search(&j).expect("A entry present in L")
                } else {
                    let row = &u_idx[u_ptr[i]..u_ptr[i + 1]];
                    nnz_l + u_ptr[i] + row.binary_search(&j).expect("A entry present in U")
                };
            }
        }

        Ok(Self {
            n,
            ordering,
            fill,
            l_ptr,
            l_idx,
            u_ptr,
            u_idx,
            lower,
            upper,
            a_row_ptr: a.row_ptr().to_vec(),
            a_col_idx: a.col_idx().to_vec(),
            a_slots,
            fast_plan: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    pub fn fill(&self) -> FillLevel {
        self.fill
    }

    pub fn nnz_l(&self) -> usize {
        self.l_idx.len()
    }

    pub fn nnz_u(&self) -> usize {
        self.u_idx.len()
    }

    /// Stored entries of `L + U` (diagonal counted once).
    pub fn nnz(&self) -> usize {
        self.nnz_l() + self.nnz_u()
    }

    pub fn l_pattern(&self) -> (&[usize], &[usize]) {
        (&self.l_ptr, &self.l_idx)
    }

    pub fn u_pattern(&self) -> (&[usize], &[usize]) {
        (&self.u_ptr, &self.u_idx)
    }

    pub fn lower_levels(&self) -> &LevelSchedule {
        &self.lower
    }

    pub fn upper_levels(&self) -> &LevelSchedule {
        &self.upper
    }

    pub(crate) fn a_slots(&self) -> &[usize] {
        &self.a_slots
    }

    /// Pattern of `L + U` in the permuted numbering, as a CSR matrix of ones.
    pub fn combined_pattern(&self) -> CsrMatrix<f64> {
        let mut trip = Vec::with_capacity(self.nnz());
        for i in 0..self.n {
            for &j in &self.l_idx[self.l_ptr[i]..self.l_ptr[i + 1]] {
                trip.push((i, j, 1.0));
            }
            for &j in &self.u_idx[self.u_ptr[i]..self.u_ptr[i + 1]] {
                trip.push((i, j, 1.0));
            }
        }
        CsrMatrix::from_triplets(self.n, self.n, &trip).expect("pattern in range")
    }

    /// Checks that `a` has the pattern the symbolic phase was built from.
    pub fn check_pattern<T: Scalar>(&self, a: &CsrMatrix<T>) -> Result<()> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                op: "numeric factorization",
                expected: self.n,
                found: a.nrows(),
            });
        }
        if a.row_ptr() != self.a_row_ptr.as_slice() || a.col_idx() != self.a_col_idx.as_slice() {
            return Err(Error::InvalidStructure(
                "matrix pattern differs from the symbolic factorization".into(),
            ));
        }
        Ok(())
    }

    /// Copies the values of `a` into zero-initialised `L` and `U` slots.
    pub(crate) fn scatter_values<T: Scalar>(&self, a: &CsrMatrix<T>) -> Result<(Vec<T>, Vec<T>)> {
        self.check_pattern(a)?;
        let nnz_l = self.nnz_l();
        let mut l = vec![T::zero(); nnz_l];
        let mut u = vec![T::zero(); self.nnz_u()];
        for (&slot, &v) in self.a_slots.iter().zip(a.values()) {
            if slot < nnz_l {
                l[slot] += v;
            } else {
                u[slot - nnz_l] += v;
            }
        }
        Ok((l, u))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arrow(n: usize) -> CsrMatrix<f64> {
        // Dense first row and column: full fill in natural order.
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 4.0));
            if i > 0 {
                trip.push((0, i, 1.0));
                trip.push((i, 0, 1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &trip).unwrap()
    }

    #[test]
    fn tridiagonal_has_no_fill() {
        let a = CsrMatrix::<f64>::tridiagonal(6, -1.0, 2.0, -1.0);
        let s = symbolic_lu(&a, Ordering::natural(6)).unwrap();
        assert_eq!(s.nnz(), a.nnz());
        assert_eq!(s.lower_levels().num_levels(), 6);
    }

    #[test]
    fn arrow_fills_completely_and_ilu0_does_not() {
        let a = arrow(5);
        let s = symbolic_lu(&a, Ordering::natural(5)).unwrap();
        assert_eq!(s.nnz(), 25);
        let s0 = symbolic_ilu_k(&a, Ordering::natural(5), 0).unwrap();
        assert_eq!(s0.nnz(), a.nnz());
        let s1 = symbolic_ilu_k(&a, Ordering::natural(5), 1).unwrap();
        assert_eq!(s1.nnz(), 25);
    }

    #[test]
    fn diagonal_always_present() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let s = symbolic_ilu_k(&a, Ordering::natural(2), 0).unwrap();
        let (up, ui) = s.u_pattern();
        assert_eq!(ui[up[0]], 0);
        assert_eq!(ui[up[1]], 1);
    }

    #[test]
    fn rejects_foreign_pattern() {
        let a = CsrMatrix::<f64>::tridiagonal(4, -1.0, 2.0, -1.0);
        let s = symbolic_lu(&a, Ordering::natural(4)).unwrap();
        assert!(s.check_pattern(&CsrMatrix::<f64>::identity(4)).is_err());
    }
}
