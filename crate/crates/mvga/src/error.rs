//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("basis size C({n}+{d}, {d}) does not fit the count type", n = .n, d = .d)]
    BasisSizeOverflow { d: usize, n: u32 },

    #[error("parent table has not been built for this basis")]
    MissingParentTable,

    #[error("coordinate index {coord} out of range for dimension {d}")]
    CoordinateOutOfRange { coord: usize, d: usize },

    #[error("block {block} is not part of a stacked space with d={d}, order={order}")]
    InvalidBlock {
        block: String,
        d: usize,
        order: u8,
    },

    #[error("stacked layout mismatch: expected m={expected_m}, d={expected_d}, order={expected_order}; got m={got_m}, d={got_d}, order={got_order}")]
    LayoutMismatch {
        expected_m: usize,
        expected_d: usize,
        expected_order: u8,
        got_m: usize,
        got_d: usize,
        got_order: u8,
    },

    #[error("value length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("node index {node} out of range for {m} nodes")]
    NodeOutOfRange { node: usize, m: usize },

    #[error("collocation row must have at least one term")]
    EmptyRow,

    #[error("collocation map must have at least one row")]
    EmptyMap,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("degenerate inner product: the constant column has zero G-norm")]
    DegenerateInnerProduct,

    #[error("triangular factor diagonal entry {index} is not strictly positive")]
    NonPositiveDiagonal { index: usize },

    #[error("model does not retain the orthonormal column store")]
    MissingQ,

    #[error("model has no coefficient vector")]
    MissingCoefficients,

    #[error("least-squares problem does not match the model's collocation map")]
    MapMismatch,

    #[error("row count mismatch: map has {map_rows} rows, right-hand side has {rhs_len} entries")]
    RowCountMismatch { map_rows: usize, rhs_len: usize },

    #[error("normal vector at node {node} has length {norm}, expected unit length")]
    NonUnitNormal { node: usize, norm: f64 },

    #[error("node generation produced no points for the requested domain/targets")]
    InfeasibleTargets,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
