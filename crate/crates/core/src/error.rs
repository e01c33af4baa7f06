use thiserror::Error;

/// Errors raised by the orbit and frame routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (|U*U - I| = {0:.3e})")]
    NotUnitary(f64),

    #[error("vector is not sorted non-increasingly or has non-finite entries")]
    NotSorted,

    #[error("eigen-solver did not converge (reconstruction residual {residual:.3e})")]
    EigenNoConvergence { residual: f64 },

    #[error("SVD did not converge (reconstruction residual {residual:.3e})")]
    SvdNoConvergence { residual: f64 },

    #[error("invalid norm specification: {0}")]
    InvalidNorm(String),

    #[error("norm {0} is not strictly convex")]
    NotStrictlyConvex(String),

    #[error("majorization precondition failed: {0}")]
    NotMajorized(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("joint SVD hypothesis violated: {0}")]
    JointSvd(String),

    #[error("vector {index} is off its sphere (relative residual {residual:.3e})")]
    OffSphere { index: usize, residual: f64 },

    #[error("non-finite objective during descent at iteration {0}")]
    Diverged(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
