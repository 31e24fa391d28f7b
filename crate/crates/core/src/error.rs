use thiserror::Error;

/// Errors raised by the spectral engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("group kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// The spectrum cannot provide what the operation needs (e.g. characters
    /// of a tabulated spectrum away from the identity).
    #[error("unsupported capability: {0}")]
    Capability(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("no trivial representation in spectrum table")]
    NoTrivialRepresentation,

    #[error("t = 0 is the point mass at the identity and has no density")]
    PointMass,

    /// Pointwise evaluation refused because continuity of the density is not
    /// established. Carries the failed criterion.
    #[error("density evaluation refused: {criterion} ({verdict})")]
    Refused {
        criterion: String,
        verdict: String,
    },

    #[error("trace series diverges: {0}")]
    DivergentTrace(String),

    #[error("spectrum mismatch: {0}")]
    SpectrumMismatch(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
