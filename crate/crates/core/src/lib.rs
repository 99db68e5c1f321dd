//! Two-level overlapping Schwarz preconditioners with GDSW and reduced-GDSW
//! coarse spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`sparse`]: CSR storage and kernels (SpMV, SpGEMM, transpose, gathers,
//!   permutations, precision conversion, MatrixMarket I/O).
//! - [`model`]: structured-grid model problems (7-point Laplace, trilinear
//!   hexahedral elasticity) with their null spaces.
//! - [`decomposition`]: box partitions, algebraic overlap, interface
//!   classification and coarse components.
//! - [`coarse`]: energy-minimizing coarse basis and the Galerkin coarse matrix.
//! - [`local`]: orderings, exact LU, ILU(k), fixed-point ILU and triangular
//!   solves, all with a symbolic / numeric / solve lifecycle.
//! - [`schwarz`]: assembly and application of the additive preconditioner.
//! - [`krylov`]: restarted GMRES (classic and single-reduce).

pub mod coarse;
pub mod decomposition;
pub mod error;
pub mod graph;
pub mod krylov;
pub mod local;
pub mod model;
pub mod scalar;
pub mod schwarz;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::Scalar;
