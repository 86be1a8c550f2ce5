use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} shape")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid tolerance policy: zero threshold {zero} exceeds relative tolerance {rel}")]
    InvalidTolerance { zero: f64, rel: f64 },

    #[error("size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("layer index {ell} out of range 1..={layers}")]
    LayerOutOfRange { ell: usize, layers: usize },

    #[error("invalid support tuple: {0}")]
    InvalidSupport(String),

    #[error("contribution {index} still has a missing cell at ({row}, {col})")]
    MissingCell {
        index: usize,
        row: usize,
        col: usize,
    },

    #[error("contribution {index} is not rank one within tolerance")]
    RankTooHigh { index: usize },

    #[error("invalid partitioning tree: {0}")]
    InvalidTree(String),

    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
