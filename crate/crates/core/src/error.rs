//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by vector/operator arithmetic, tree operations,
/// density-matrix computations, the Haar codec, the representation
/// engine, the repair cascade and the JSON codec.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: dimension mismatch (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{context}: dimension must be positive")]
    ZeroDimension { context: &'static str },

    #[error("total dimension {dim} exceeds the supported cap {max}")]
    DimensionCap { dim: usize, max: usize },

    #[error("{context}: index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("operator is not hermitian (deviation {deviation:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error(
        "coefficients are not normalized (deviation {deviation:.3e}, tolerance {tolerance:.3e})"
    )]
    NotNormalized { deviation: f64, tolerance: f64 },

    #[error("bind: no parts given")]
    EmptyParts,

    #[error("bind: {0}")]
    LevelMismatch(String),

    #[error(
        "trees have different shapes; their states live in different spaces and cannot be compared"
    )]
    ShapeMismatch,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("malformed haar tree: {0}")]
    MalformedTree(String),

    #[error("damage removes every cell; nothing remains to repair")]
    EmptyRemainder,

    #[error("repair handles exactly three levels, got a tree of depth {got}")]
    UnsupportedDepth { got: usize },

    #[error("invalid organism: {0}")]
    InvalidOrganism(String),

    #[error("rebuild infeasible: the product of {cells} cell representations does not contain two_j = {target_two_j}")]
    InfeasibleRebuild { cells: usize, target_two_j: u32 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
