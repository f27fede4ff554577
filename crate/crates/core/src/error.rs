use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical method did not converge: {0}")]
    NonConvergence(String),

    #[error("point is inside the body")]
    InsideBody,

    #[error("origin is not an interior point (denominator {0:e})")]
    OriginNotInterior(f64),

    #[error("point is not on the boundary of the unit neighbourhood (|d - 1| = {0:e})")]
    NotOnUnitShell(f64),

    #[error("singular point: gradient vanishes")]
    SingularPoint,

    #[error("root multiplicity {0} is not supported here")]
    HighMultiplicity(usize),

    #[error("point lies outside the cone")]
    OutsideCone,

    #[error("functional does not support the cone: {0}")]
    NotSupporting(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of an iterative solver, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence(_) | Error::Unbounded(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
