//! Subdomain and coarse solvers with a symbolic / numeric / solve lifecycle.
//!
//! - [`order_nested_dissection`]: fill-reducing ordering.
//! - [`symbolic_lu`], [`symbolic_ilu_k`]: fill patterns and level schedules.
//! - [`numeric_lu`], [`numeric_ilu`], [`fast_ilu_numeric`]: values.
//! - [`trisolve_levelset`], [`fast_trisolve`]: application.
//!
//! No pivoting is performed anywhere; tiny pivots are reported as errors.

mod fast;
mod numeric;
mod ordering;
mod symbolic;
mod trisolve;

pub use fast::{fast_ilu_numeric, fast_trisolve, fast_trisolve_into};
pub use numeric::{numeric_ilu, numeric_ilu_with, numeric_lu, FactorMethod, IluOptions, LocalFactorization};
pub use ordering::{
    compute_ordering, order_nested_dissection, order_nested_dissection_with_leaf, Ordering,
    OrderingKind, ND_LEAF_SIZE,
};
pub use symbolic::{symbolic_ilu_k, symbolic_lu, FillLevel, LevelSchedule, SymbolicFactorization};
pub use trisolve::{trisolve_levelset, trisolve_levelset_into, TriangularWorkspace};

/// Default fixed-point sweeps for the factorization.
pub const DEFAULT_FACTOR_SWEEPS: usize = 3;
/// Default fixed-point iterations per triangular solve.
pub const DEFAULT_TRISOLVE_ITERS: usize = 5;
