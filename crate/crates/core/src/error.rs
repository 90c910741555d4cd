use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A documented precondition of the called operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// No acceptable answer at the available precision / truncation.
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    /// The precision schedule was exhausted without a verified answer.
    #[error("precision blowup: {0}")]
    PrecisionBlowup(String),

    #[error("singular seed: derivative has no invertible leading term")]
    SingularSeed,

    #[error("newton iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("series denominators differ ({0} vs {1})")]
    DenomMismatch(u32, u32),

    #[error("inexact division: {0}")]
    Divisibility(String),

    #[error("linearly dependent rows in lattice")]
    DependentRows,

    #[error("no valid b: {0}")]
    NoValidB(String),

    #[error("degenerate reduction mod p: {0}")]
    DegenerateReduction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientPrecision(_) | Error::PrecisionBlowup(_) => 3,
            Error::Parse(_) => 64,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
