use thiserror::Error;

/// Failures surfaced by the linear algebra, sketching and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is rank deficient (zero Householder pivot in column {column})")]
    RankDeficient { column: usize },
    #[error("triangular matrix is singular (zero diagonal at {index})")]
    SingularTriangular { index: usize },
    #[error("matrix is numerically singular (pivot {pivot:e} at step {step})")]
    NumericallySingular { step: usize, pivot: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at step {step})")]
    NotPositiveDefinite { step: usize, pivot: f64 },
    #[error("Jacobi SVD did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("columns are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("overflow while computing in {0}")]
    Overflow(&'static str),
    #[error("eta1 has a pole: kappa(R_s)*u1 = {0}")]
    PoleAtOne(f64),
    #[error("bound input `{0}` is missing")]
    MissingField(&'static str),
    #[error("residual direction degenerated (norm {0:e})")]
    DegenerateResidual(f64),
    #[error("io: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
