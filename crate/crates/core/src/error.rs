use thiserror::Error;

pub type Result<T> = std::result::Result<T, EcaError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EcaError {
    /// A parameter violates its documented range. Carries the constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("all values are missing")]
    AllMissing,

    #[error("series contain missing values; event sequences cannot represent gaps")]
    MissingInSequence,

    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid observation span ({start}, {end}): {reason}")]
    InvalidSpan {
        start: f64,
        end: f64,
        reason: &'static str,
    },

    #[error("series {0} contains no events; coincidence rates are undefined")]
    NoEvents(char),

    #[error("series {0} needs at least 2 events to resample waiting times")]
    TooFewEvents(char),

    #[error("symmetric windows with a non-zero lag are not supported (tau = {0})")]
    SymmetricWithLag(f64),

    #[error("tolerance {tol} exceeds the available span T - tau = {avail}")]
    ToleranceTooLarge { tol: f64, avail: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for EcaError {
    fn from(e: std::io::Error) -> Self {
        EcaError::Io(e.to_string())
    }
}

impl From<csv::Error> for EcaError {
    fn from(e: csv::Error) -> Self {
        EcaError::Parse(e.to_string())
    }
}
