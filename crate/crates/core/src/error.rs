use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("exponent norm {norm:.3e} exceeds the overflow cap {cap:.1}")]
    ExpOverflow { norm: f64, cap: f64 },

    #[error("grading is not a self-adjoint involution (residual {0:.3e})")]
    InvalidGrading(f64),

    #[error("operator has mixed parity with respect to the grading")]
    MixedParity,

    #[error("operation requires a grading operator")]
    MissingGrading,

    #[error("function is undefined at eigenvalue {0}")]
    FunctionUndefined(f64),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
