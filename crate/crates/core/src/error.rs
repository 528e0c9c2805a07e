use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid slope: {0}")]
    InvalidSlope(String),

    #[error("continued fraction tail evaluates to zero at position {0}")]
    ZeroTail(usize),

    #[error("vertex index {index} out of range for a graph with {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not negative definite: {0}")]
    NotNegativeDefinite(String),

    #[error("invalid V/H data at {sequence}[{index}]: {reason}")]
    InvalidKnotData {
        sequence: &'static str,
        index: usize,
        reason: String,
    },

    #[error("negative entry {value} at position {index}")]
    NegativeEntry { index: usize, value: i64 },

    #[error("lens space index {index} out of range for p = {p}")]
    BadLensIndex { p: u64, index: u64 },

    #[error("ambient rank {rank} exceeds the search bound {bound}")]
    SearchBoundExceeded { rank: usize, bound: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
