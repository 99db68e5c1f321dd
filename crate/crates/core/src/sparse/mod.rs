//! Compressed sparse row storage and the kernels the rest of the crate is
//! built on.
//!
//! Restrictions are never materialised as sparse matrices: an [`IndexMap`]
//! holds the sorted global indices and gathers/scatters replace products
//! with `R` and `Rᵀ`.

mod csr;
mod dense;
mod index_map;
pub mod matrix_market;
pub(crate) mod ops;

pub use csr::CsrMatrix;
pub use dense::DenseColumnBlock;
pub use index_map::IndexMap;
pub use ops::{
    convert_precision, extract_submatrix, permute_symmetric, spgemm, spmv, transpose,
};
