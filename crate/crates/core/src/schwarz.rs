//! Additive two-level Schwarz preconditioner
//!
//! ```text
//! M⁻¹ r = Φ A₀⁻¹ Φᵀ r + Σ_i R_iᵀ A_i⁻¹ R_i r
//! ```
//!
//! built in two steps: [`setup_symbolic`] looks only at the pattern of `A`,
//! [`setup_numeric`] factors the values. The numeric phase can run in single
//! precision; application then rounds the input to single and promotes the
//! result.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use parking_lot::Mutex;
use rayon::prelude::*;

use crate::coarse::{build_coarse_basis, interior_blocks, CoarseBasis};
use crate::decomposition::{build_components, ComponentMode, Decomposition, InterfaceStructure};
use crate::error::{Error, Result};
use crate::krylov::LinearOperator;
use crate::local::{
    compute_ordering, fast_ilu_numeric, numeric_ilu, numeric_lu, FillLevel, LocalFactorization,
    OrderingKind, SymbolicFactorization, TriangularWorkspace,
};
use crate::scalar::Scalar;
use crate::sparse::{extract_submatrix, spmv, CsrMatrix, DenseColumnBlock, IndexMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoarseSpace {
    None,
    Gdsw,
    Rgdsw,
}

impl CoarseSpace {
    fn mode(self) -> Option<ComponentMode> {
        match self {
            CoarseSpace::None => None,
            CoarseSpace::Gdsw => Some(ComponentMode::Gdsw),
            CoarseSpace::Rgdsw => Some(ComponentMode::Rgdsw),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalSolverKind {
    ExactLu,
    Ilu {
        level: usize,
    },
    FastIlu {
        level: usize,
        sweeps: usize,
        trisolve_iters: usize,
    },
}

impl LocalSolverKind {
    fn fill(self) -> FillLevel {
        match self {
            LocalSolverKind::ExactLu => FillLevel::Exact,
            LocalSolverKind::Ilu { level } | LocalSolverKind::FastIlu { level, .. } => {
                FillLevel::Level(level)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    Double,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchwarzConfig {
    pub coarse: CoarseSpace,
    pub local_solver: LocalSolverKind,
    pub ordering: OrderingKind,
    pub precision: Precision,
}

impl Default for SchwarzConfig {
    fn default() -> Self {
        Self {
            coarse: CoarseSpace::Rgdsw,
            local_solver: LocalSolverKind::ExactLu,
            ordering: OrderingKind::NestedDissection,
            precision: Precision::Double,
        }
    }
}

/// Pattern-only part of the preconditioner.
#[derive(Clone, Debug)]
pub struct SchwarzSkeleton {
    config: SchwarzConfig,
    n: usize,
    a_row_ptr: Vec<usize>,
    a_col_idx: Vec<usize>,
    overlap_maps: Vec<IndexMap>,
    local_symbolic: Vec<Arc<SymbolicFactorization>>,
    interface: Option<InterfaceStructure>,
    interior_symbolic: Vec<Arc<SymbolicFactorization>>,
    /// For every dof, the `(subdomain, local position)` pairs covering it.
    contrib_ptr: Vec<usize>,
    contrib: Vec<(usize, usize)>,
    structural_hash: u64,
}

impl SchwarzSkeleton {
    pub fn config(&self) -> &SchwarzConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_subdomains(&self) -> usize {
        self.overlap_maps.len()
    }

    pub fn overlap_maps(&self) -> &[IndexMap] {
        &self.overlap_maps
    }

    pub fn local_symbolic(&self) -> &[Arc<SymbolicFactorization>] {
        &self.local_symbolic
    }

    pub fn interface(&self) -> Option<&InterfaceStructure> {
        self.interface.as_ref()
    }

    /// Hash of every pattern-derived quantity; equal for equal inputs.
    pub fn structural_hash(&self) -> u64 {
        self.structural_hash
    }

    pub fn max_local_size(&self) -> usize {
        self.overlap_maps.iter().map(IndexMap::len).max().unwrap_or(0)
    }

    /// Stored entries over all local factors.
    pub fn local_factor_nnz(&self) -> usize {
        self.local_symbolic.iter().map(|s| s.nnz()).sum()
    }
}

fn symbolic_for<T: Scalar>(
    m: &CsrMatrix<T>,
    ordering: OrderingKind,
    fill: FillLevel,
) -> Result<Arc<SymbolicFactorization>> {
    let ord = compute_ordering(m, ordering);
    Ok(Arc::new(SymbolicFactorization::new(m, ord, fill)?))
}

/// Extracts local and interior patterns and runs every symbolic factorization.
///
/// Values of `a` are not read. When the coarse space differs from the mode the
/// decomposition's components were built for, the components are rebuilt.
pub fn setup_symbolic<T: Scalar>(
    a: &CsrMatrix<T>,
    decomposition: &Decomposition,
    config: &SchwarzConfig,
) -> Result<SchwarzSkeleton> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            op: "schwarz setup (square)",
            expected: n,
            found: a.ncols(),
        });
    }
    if decomposition.partition.num_dofs() != n {
        return Err(Error::DimensionMismatch {
            op: "schwarz setup (decomposition)",
            expected: n,
            found: decomposition.partition.num_dofs(),
        });
    }
    let pattern = a.pattern();
    let overlap_maps = decomposition.overlap.sets.clone();
    let fill = config.local_solver.fill();
    let local_symbolic = overlap_maps
        .par_iter()
        .map(|ov| symbolic_for(&extract_submatrix(&pattern, ov, ov)?, config.ordering, fill))
        .collect::<Result<Vec<_>>>()?;

    let (interface, interior_symbolic) = match config.coarse.mode() {
        None => (None, Vec::new()),
        Some(mode) => {
            let structure = if decomposition.interface.mode == Some(mode) {
                decomposition.interface.clone()
            } else {
                build_components(&decomposition.interface, mode)?
            };
            let interior = interior_blocks(&pattern, &structure)?
                .par_iter()
                .map(|m| symbolic_for(m, config.ordering, FillLevel::Exact))
                .collect::<Result<Vec<_>>>()?;
            (Some(structure), interior)
        }
    };

    let mut counts = vec![0usize; n + 1];
    for ov in &overlap_maps {
        for d in ov.iter() {
            counts[d + 1] += 1;
        }
    }
    for d in 0..n {
        counts[d + 1] += counts[d];
    }
    let mut fillp = counts.clone();
    let mut contrib = vec![(0, 0); counts[n]];
    for (s, ov) in overlap_maps.iter().enumerate() {
        for (k, d) in ov.iter().enumerate() {
            contrib[fillp[d]] = (s, k);
            fillp[d] += 1;
        }
    }

    let mut h = DefaultHasher::new();
    config.hash(&mut h);
    n.hash(&mut h);
    a.row_ptr().hash(&mut h);
    a.col_idx().hash(&mut h);
    overlap_maps.hash(&mut h);
    for s in local_symbolic.iter().chain(&interior_symbolic) {
        s.ordering().hash(&mut h);
        s.l_pattern().hash(&mut h);
        s.u_pattern().hash(&mut h);
    }
    interface.hash(&mut h);

    Ok(SchwarzSkeleton {
        config: *config,
        n,
        a_row_ptr: a.row_ptr().to_vec(),
        a_col_idx: a.col_idx().to_vec(),
        overlap_maps,
        local_symbolic,
        interface,
        interior_symbolic,
        contrib_ptr: counts,
        contrib,
        structural_hash: h.finish(),
    })
}

/// Coarse basis and the factorization of `A₀`.
#[derive(Clone, Debug)]
pub struct CoarseLevel<T: Scalar> {
    pub basis: CoarseBasis<T>,
    pub factor: LocalFactorization<T>,
}

#[derive(Debug)]
pub struct TwoLevelPreconditioner<T: Scalar> {
    skeleton: Arc<SchwarzSkeleton>,
    local: Vec<LocalFactorization<T>>,
    coarse: Option<CoarseLevel<T>>,
    pool: Mutex<Vec<ApplyWorkspace<T>>>,
}

/// Scratch for one application.
#[derive(Debug)]
pub struct ApplyWorkspace<T: Scalar> {
    r: Vec<T>,
    coarse_out: Vec<T>,
    coarse_rhs: Vec<T>,
    coarse_sol: Vec<T>,
    coarse_tri: TriangularWorkspace<T>,
    locals: Vec<LocalScratch<T>>,
}

#[derive(Debug)]
struct LocalScratch<T: Scalar> {
    rhs: Vec<T>,
    sol: Vec<T>,
    tri: TriangularWorkspace<T>,
}

/// Numeric phase: factors local and interior blocks, builds `Φ` and `A₀`.
///
/// `z` is the null space used for the coarse space; required unless the
/// configuration has no coarse level.
pub fn setup_numeric<T: Scalar>(
    skeleton: Arc<SchwarzSkeleton>,
    a: &CsrMatrix<f64>,
    z: Option<&DenseColumnBlock<f64>>,
) -> Result<TwoLevelPreconditioner<T>> {
    if a.row_ptr() != skeleton.a_row_ptr.as_slice() || a.col_idx() != skeleton.a_col_idx.as_slice()
    {
        return Err(Error::InvalidStructure(
            "matrix pattern differs from the one the skeleton was built for".into(),
        ));
    }
    let at: CsrMatrix<T> = a.cast()?;
    let kind = skeleton.config.local_solver;

    let local = skeleton
        .overlap_maps
        .par_iter()
        .zip(skeleton.local_symbolic.par_iter())
        .enumerate()
        .map(|(s, (ov, sym))| {
            let ai = extract_submatrix(&at, ov, ov)?;
            let fac = match kind {
                LocalSolverKind::ExactLu => numeric_lu(sym.clone(), &ai),
                LocalSolverKind::Ilu { .. } => numeric_ilu(sym.clone(), &ai),
                LocalSolverKind::FastIlu {
                    sweeps,
                    trisolve_iters,
                    ..
                } => fast_ilu_numeric(sym.clone(), &ai, sweeps, trisolve_iters),
            };
            fac.map_err(|e| Error::SingularLocal {
                subdomain: s,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let coarse = match &skeleton.interface {
        None => None,
        Some(structure) => {
            let z = z.ok_or_else(|| {
                Error::InvalidConfig("a coarse space needs the null-space block".into())
            })?;
            let blocks = interior_blocks(&at, structure)?;
            let interior = blocks
                .par_iter()
                .zip(skeleton.interior_symbolic.par_iter())
                .enumerate()
                .map(|(s, (m, sym))| {
                    numeric_lu(sym.clone(), m).map_err(|e| Error::SingularInterior {
                        subdomain: s,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let basis = build_coarse_basis(&at, &z.cast::<T>(), structure, &interior)?;
            let sym = symbolic_for(&basis.a0, skeleton.config.ordering, FillLevel::Exact)
                .map_err(|e| Error::SingularCoarse(Box::new(e)))?;
            let factor =
                numeric_lu(sym, &basis.a0).map_err(|e| Error::SingularCoarse(Box::new(e)))?;
            Some(CoarseLevel { basis, factor })
        }
    };

    let pre = TwoLevelPreconditioner {
        skeleton,
        local,
        coarse,
        pool: Mutex::new(Vec::new()),
    };
    let ws = pre.workspace();
    pre.pool.lock().push(ws);
    Ok(pre)
}

impl<T: Scalar> TwoLevelPreconditioner<T> {
    pub fn skeleton(&self) -> &Arc<SchwarzSkeleton> {
        &self.skeleton
    }

    pub fn n(&self) -> usize {
        self.skeleton.n
    }

    pub fn local_factorizations(&self) -> &[LocalFactorization<T>] {
        &self.local
    }

    pub fn coarse(&self) -> Option<&CoarseLevel<T>> {
        self.coarse.as_ref()
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.as_ref().map_or(0, |c| c.basis.num_columns())
    }

    pub fn precision(&self) -> Precision {
        self.skeleton.config.precision
    }

    pub fn workspace(&self) -> ApplyWorkspace<T> {
        let nc = self.coarse_dim();
        ApplyWorkspace {
            r: vec![T::zero(); self.n()],
            coarse_out: vec![T::zero(); if self.coarse.is_some() { self.n() } else { 0 }],
            coarse_rhs: vec![T::zero(); nc],
            coarse_sol: vec![T::zero(); nc],
            coarse_tri: TriangularWorkspace::new(nc),
            locals: self
                .skeleton
                .overlap_maps
                .iter()
                .map(|ov| LocalScratch {
                    rhs: vec![T::zero(); ov.len()],
                    sol: vec![T::zero(); ov.len()],
                    tri: TriangularWorkspace::new(ov.len()),
                })
                .collect(),
        }
    }

    /// `z = M⁻¹ r` with caller-provided scratch.
    pub fn apply_with(&self, r: &[f64], z: &mut [f64], ws: &mut ApplyWorkspace<T>) -> Result<()> {
        self.apply_levels(r, z, ws, true, true)
    }

    /// Only the subdomain sum `Σ R_iᵀ A_i⁻¹ R_i r`.
    pub fn apply_one_level(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let mut ws = self.workspace();
        self.apply_levels(r, z, &mut ws, false, true)
    }

    /// Only the coarse term `Φ A₀⁻¹ Φᵀ r` (zero without a coarse level).
    pub fn apply_coarse(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let mut ws = self.workspace();
        self.apply_levels(r, z, &mut ws, true, false)
    }

    fn apply_levels(
        &self,
        r: &[f64],
        z: &mut [f64],
        ws: &mut ApplyWorkspace<T>,
        with_coarse: bool,
        with_local: bool,
    ) -> Result<()> {
        let n = self.n();
        for (len, op) in [(r.len(), "schwarz apply (input)"), (z.len(), "schwarz apply (output)")] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    op,
                    expected: n,
                    found: len,
                });
            }
        }
        for (ri, &v) in ws.r.iter_mut().zip(r) {
            *ri = T::of_f64(v);
        }

        let use_coarse = with_coarse && self.coarse.is_some();
        if let (true, Some(c)) = (use_coarse, &self.coarse) {
            spmv(&c.basis.phi_t, &ws.r, &mut ws.coarse_rhs, T::one(), T::zero())?;
            c.factor
                .solve_into(&ws.coarse_rhs, &mut ws.coarse_sol, &mut ws.coarse_tri)?;
            spmv(&c.basis.phi, &ws.coarse_sol, &mut ws.coarse_out, T::one(), T::zero())?;
        }

        if with_local {
            let rr = &ws.r;
            ws.locals
                .par_iter_mut()
                .zip(self.skeleton.overlap_maps.par_iter())
                .zip(self.local.par_iter())
                .try_for_each(|((sc, ov), fac)| {
                    ov.gather(rr, &mut sc.rhs);
                    fac.solve_into(&sc.rhs, &mut sc.sol, &mut sc.tri)
                })?;
        }

        // Fixed-order compensated sum per dof: coarse term, then subdomains.
        let sk = &self.skeleton;
        let locals = &ws.locals;
        let coarse_out = &ws.coarse_out;
        let entry = |d: usize| -> f64 {
            let mut sum = T::zero();
            let mut comp = T::zero();
            let mut add = |v: T| {
                let t = sum + v;
                if sum.abs() >= v.abs() {
                    comp += (sum - t) + v;
                } else {
                    comp += (v - t) + sum;
                }
                sum = t;
            };
            if use_coarse {
                add(coarse_out[d]);
            }
            if with_local {
                for &(s, k) in &sk.contrib[sk.contrib_ptr[d]..sk.contrib_ptr[d + 1]] {
                    add(locals[s].sol[k]);
                }
            }
            (sum + comp).as_f64()
        };
        if n >= 8192 {
            z.par_iter_mut().enumerate().for_each(|(d, zd)| *zd = entry(d));
        } else {
            z.iter_mut().enumerate().for_each(|(d, zd)| *zd = entry(d));
        }
        Ok(())
    }
}

impl<T: Scalar> LinearOperator for TwoLevelPreconditioner<T> {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        let ws = self.pool.lock().pop();
        let mut ws = ws.unwrap_or_else(|| self.workspace());
        let out = self.apply_with(x, y, &mut ws);
        self.pool.lock().push(ws);
        out
    }
}

/// A preconditioner in either precision behind one type.
#[derive(Debug)]
pub enum Preconditioner {
    Double(TwoLevelPreconditioner<f64>),
    Single(TwoLevelPreconditioner<f32>),
}

impl Preconditioner {
    /// Numeric phase in the precision the skeleton's configuration asks for.
    pub fn setup(
        skeleton: Arc<SchwarzSkeleton>,
        a: &CsrMatrix<f64>,
        z: Option<&DenseColumnBlock<f64>>,
    ) -> Result<Self> {
        Ok(match skeleton.config.precision {
            Precision::Double => Preconditioner::Double(setup_numeric(skeleton, a, z)?),
            Precision::Single => Preconditioner::Single(setup_numeric(skeleton, a, z)?),
        })
    }

    pub fn coarse_dim(&self) -> usize {
        match self {
            Preconditioner::Double(p) => p.coarse_dim(),
            Preconditioner::Single(p) => p.coarse_dim(),
        }
    }

    pub fn skeleton(&self) -> &Arc<SchwarzSkeleton> {
        match self {
            Preconditioner::Double(p) => p.skeleton(),
            Preconditioner::Single(p) => p.skeleton(),
        }
    }
}

impl LinearOperator for Preconditioner {
    fn dim(&self) -> usize {
        match self {
            Preconditioner::Double(p) => p.n(),
            Preconditioner::Single(p) => p.n(),
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        match self {
            Preconditioner::Double(p) => p.apply(x, y),
            Preconditioner::Single(p) => p.apply(x, y),
        }
    }
}
