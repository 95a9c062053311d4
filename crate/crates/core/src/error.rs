use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entries length {len} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid Pauli string {text:?}: {reason}")]
    InvalidPauli { text: String, reason: String },

    #[error("numerical inconsistency: negative variance radicand {radicand:e}")]
    NegativeRadicand { radicand: f64 },

    #[error("count {count} of component {index} is not an integer")]
    NonIntegralCount { index: usize, count: f64 },

    #[error("product space dimension {dim}^{molecules} exceeds the 2^20 cap")]
    CapExceeded { dim: usize, molecules: u64 },

    #[error("decomposition has negative weight {min_weight:e} (epsilon = {epsilon})")]
    PositivityViolation { epsilon: f64, min_weight: f64 },

    #[error("relaxation rate is zero: no relaxation")]
    NoRelaxation,

    #[error("Born probabilities sum to {total}, not 1")]
    ProbabilityNormalization { total: f64 },
}
