use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate {t} outside the range of model {model}")]
    Domain { model: String, t: f64 },

    #[error("operation `{op}` is not supported on model {model}")]
    UnsupportedModel { model: String, op: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid parameter for {family}: {reason}")]
    InvalidParameter { family: String, reason: String },

    #[error("non-finite value at node {index} (t = {t})")]
    NonFinite { index: usize, t: f64 },

    #[error("singular system: {0}")]
    Singular(String),

    #[error("model {model} is {p}-parabolic: the Green profile integral diverges")]
    ParabolicModel { model: String, p: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parameter relation `{condition}` violated: {detail}")]
    Relation {
        condition: &'static str,
        detail: String,
    },

    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("case `{id}`: {source}")]
    Case {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Whether the error stems from the configuration rather than the numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_)
            | Error::Io { .. }
            | Error::InvalidParameter { .. }
            | Error::Relation { .. } => true,
            Error::Case { source, .. } => source.is_config(),
            _ => false,
        }
    }

    pub fn in_case(self, id: impl Into<String>) -> Self {
        Error::Case {
            id: id.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
