use thiserror::Error;

/// Errors raised by the spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have dimension at least 1")]
    EmptyMatrix,

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: entry ({row}, {col}) deviates from its conjugate partner by {deviation:e}")]
    NotHermitian { row: usize, col: usize, deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("eigenvalue {eigenvalue} lies within the guard band of boundary point {boundary}")]
    BoundaryCollision { eigenvalue: f64, boundary: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("invalid interval set: {0}")]
    InvalidIntervals(String),

    #[error("eigenvalues do not interlace strictly (first violation at position {position})")]
    InterlacingViolation { position: usize },

    #[error("index sets differ in cardinality: |J_A| = {ja}, |J_B| = {jb}")]
    CardinalityMismatch { ja: usize, jb: usize },

    #[error("coincident nodes {left} and {right}")]
    CoincidentNodes { left: f64, right: f64 },

    #[error("boundary classification is {found}, operation requires {expected}")]
    ClassificationMismatch { expected: String, found: String },

    #[error("adaptive quadrature did not reach tolerance {tolerance:e} within the subdivision cap")]
    QuadratureNoConvergence { tolerance: f64 },

    #[error("set must be bounded")]
    UnboundedSet,

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
