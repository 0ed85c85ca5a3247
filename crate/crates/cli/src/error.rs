use std::fmt;
use std::process::ExitCode;

use fbm_ruin::Error;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1: the configuration is unusable; `key` names the culprit.
    Config { key: String, message: String },
    /// Exit 2: too few ruin events to say anything.
    Infeasible(String),
    /// Exit 3: an invariant broke or the artifacts could not be written.
    Internal(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config { .. } => 1,
            CliError::Infeasible(_) => 2,
            CliError::Internal(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { key, message } => write!(f, "config error at key `{key}`: {message}"),
            CliError::Infeasible(m) => write!(f, "statistically infeasible: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

/// Config key a library parameter name corresponds to.
fn config_key(name: &str) -> &str {
    match name {
        "replications" => "reps",
        "S" => "s_horizon",
        "step" => "grid_step",
        "fraction" | "d" => "d_fraction",
        "t_u" => "horizon",
        other => other,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::HurstOutOfRange(_) => CliError::config("hurst", message),
            Error::InvalidParam { name, .. } => CliError::config(config_key(name), message),
            Error::InvalidGrid(ref m) if m.contains("horizon") => CliError::config("horizon", message),
            Error::InvalidGrid(_) | Error::GridTooLarge { .. } => CliError::config("grid_n", message),
            Error::S0OutOfRange { .. } => CliError::config("s0", message),
            Error::GammaOutOfRange(_) => CliError::config("gamma", message),
            Error::RegimeMismatch(_) => CliError::config("scenario", message),
            Error::MissingConstant(what) if what.starts_with("Pickands") => CliError::config("pickands", message),
            Error::MissingConstant(_) => CliError::config("piterbarg", message),
            Error::BadExpansionSpec(_) => CliError::config("d_fraction", message),
            Error::InfeasibleRareEvent { .. } | Error::TooFewObservations { .. } => CliError::Infeasible(message),
            Error::NegativeEigenvalue { .. }
            | Error::LengthMismatch { .. }
            | Error::NonZeroStart(_)
            | Error::OutOfTriangle { .. }
            | Error::SOutOfRange(_)
            | Error::Internal(_)
            | Error::Io(_) => CliError::Internal(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(format!("csv: {e}"))
    }
}
