use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid CSR structure: {0}")]
    InvalidStructure(String),

    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    #[error("value at ({row}, {col}) overflows single precision")]
    PrecisionOverflow { row: usize, col: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("reduced GDSW needs vertex components but the interface has none; use the gdsw coarse space for this partition")]
    NoVertexComponents,

    #[error("zero pivot {value:e} at eliminated row {row} (original index {original})")]
    ZeroPivot {
        row: usize,
        original: usize,
        value: f64,
    },

    #[error("fixed-point ILU produced a non-finite iterate after sweep {sweep}; use a more conservative initial guess or the exact ILU")]
    NonFiniteIterate { sweep: usize },

    #[error("singular interior block in subdomain {subdomain}: {source}")]
    SingularInterior {
        subdomain: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular local matrix in subdomain {subdomain}: {source}")]
    SingularLocal {
        subdomain: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular coarse matrix: {0}")]
    SingularCoarse(#[source] Box<Error>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
