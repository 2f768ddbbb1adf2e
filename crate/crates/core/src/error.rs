use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,

    #[error("non-finite value at row {row}")]
    NonFiniteValue { row: usize },

    #[error("length mismatch: {xs} covariates vs {ys} responses")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("sample too small: need at least {needed} points, got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    /// All values identical; the entropy estimate would be -infinity.
    #[error("degenerate sample: all values are identical")]
    DegenerateSample,

    #[error("bandwidth schedule violation: beta = {beta} outside (0, {bound}) for alpha = {alpha}")]
    ScheduleViolation { alpha: f64, beta: f64, bound: f64 },

    #[error("kernel ridge system is singular (lambda too small for this sample)")]
    SingularSystem,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
