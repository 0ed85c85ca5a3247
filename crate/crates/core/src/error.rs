use thiserror::Error;

/// Errors raised by the samplers, evaluators and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("hurst index must lie in the open interval (0, 1), got {0}")]
    HurstOutOfRange(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("circulant embedding produced eigenvalue {value:e} at index {index}")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("dense factorization limited to {max} steps, requested {requested}")]
    GridTooLarge { requested: usize, max: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("reflected input must start at 0, got {0}")]
    NonZeroStart(f64),

    #[error("s0 = {s0} outside [0, t0) with t0 = {t0}")]
    S0OutOfRange { s0: f64, t0: f64 },

    #[error("gamma = {0} outside the admissible range for this formula")]
    GammaOutOfRange(f64),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("missing constant: {0}")]
    MissingConstant(&'static str),

    #[error("bad expansion spec: {0}")]
    BadExpansionSpec(String),

    #[error("point ({s}, {t}) outside the triangle 0 <= s <= t <= 1")]
    OutOfTriangle { s: f64, t: f64 },

    #[error("s = {0} outside the open interval (0, 1)")]
    SOutOfRange(f64),

    #[error("no ruin in {replications} replications; probability below ~{upper_bound:e}")]
    InfeasibleRareEvent { replications: u64, upper_bound: f64 },

    #[error("{have} observations, at least {need} required")]
    TooFewObservations { have: usize, need: usize },

    #[error("internal invariant breached: {0}")]
    Internal(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
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

pub type Result<T> = std::result::Result<T, Error>;
