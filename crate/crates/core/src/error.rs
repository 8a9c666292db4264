use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid world: {0}")]
    InvalidWorld(String),

    #[error("path must not be empty")]
    EmptyPath,

    #[error("path does not start at the current pose (offset {offset:.3e})")]
    PathStart { offset: f64 },

    #[error("command exceeds kinematic limits: {0}")]
    LimitExceeded(String),

    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
