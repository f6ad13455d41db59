use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive definite: pivot {index} has value {value:e}")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("matrix is singular: pivot {index} vanishes")]
    SingularMatrix { index: usize },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("eigenvalue {index} is not positive ({value:e})")]
    NonPositiveEigenvalue { index: usize, value: f64 },

    #[error("update column {index} is degenerate")]
    DegenerateColumn { index: usize },

    #[error("optimal gamma is infeasible: {0}")]
    FeasibilityViolation(String),

    #[error("gamma lies outside the domain where A(gamma) is positive definite (coordinate {index})")]
    OutsideDomain { index: usize },

    #[error("column {index} of the matrix is zero")]
    ZeroColumn { index: usize },

    #[error("block {index} does not have full column rank")]
    RankDeficientBlock { index: usize },

    #[error("empty run set: {0}")]
    EmptyRunSet(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
