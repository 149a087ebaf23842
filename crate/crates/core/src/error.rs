use thiserror::Error;

/// Errors raised by the linear-algebra kernels, optimizers and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {threshold:e}")]
    NotHermitian { asymmetry: f64, threshold: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} below {threshold:e}")]
    NotPsd { min_eigenvalue: f64, threshold: f64 },

    #[error("matrix is not invertible: smallest singular value {sigma_min:e} below {threshold:e}")]
    NotInvertible { sigma_min: f64, threshold: f64 },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid oracle supports dimension 2 or 3, got {0}")]
    DimensionTooLarge(usize),

    #[error("invalid weights: {0}")]
    WeightError(String),

    #[error("exponent {0} outside the admissible range")]
    BadExponent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operand violates precondition: {0}")]
    OperandError(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid generator spec: {0}")]
    Spec(String),

    #[error("invalid sweep configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
