use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = UqError> = std::result::Result<T, E>;

/// Errors raised across the library, grouped by the CLI exit code they map to.
#[derive(Debug, Error)]
pub enum UqError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl UqError {
    pub fn config(msg: impl Into<String>) -> Self {
        UqError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        UqError::Data(msg.into())
    }

    pub fn dim(msg: impl Into<String>) -> Self {
        UqError::Dimension(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        UqError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        UqError::Json {
            context: context.into(),
            source,
        }
    }

    /// Process exit code: 2 configuration, 3 data, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            UqError::Config(_) | UqError::Json { .. } => 2,
            UqError::Dimension(_) | UqError::Data(_) => 3,
            UqError::Io { .. } => 4,
        }
    }
}
