use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("subsystem dimension {dim} at position {position} is below 2")]
    DimensionTooSmall { position: usize, dim: usize },

    #[error("need at least 2 subsystems, got {0}")]
    TooFewSubsystems(usize),

    #[error("total dimension {total} exceeds the dense-algebra cap {cap}")]
    TotalDimensionTooLarge { total: usize, cap: usize },

    #[error("amplitude vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is {rows}x{cols}, expected {expected}x{expected}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("matrix is not Hermitian: max |A - A^H| element is {max_deviation:.3e}")]
    NotHermitian { max_deviation: f64 },

    #[error("trace is {trace} (re) + {trace_im}i, expected 1 within {tolerance:.1e}")]
    TraceNotOne {
        trace: f64,
        trace_im: f64,
        tolerance: f64,
    },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("subsystem dimensions {left:?} and {right:?} do not match")]
    DimsMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("state file error: {0}")]
    StateFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
