use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the analysis, synthesis and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed arguments that violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),

    /// Invalid configuration value (unknown window kind, bad generator settings, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A least-squares system was too badly conditioned to solve.
    #[error("ill-conditioned system (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    /// An estimator could not produce a result for the given input.
    #[error("analysis failure: {0}")]
    Analysis(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported audio format in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("WAV error on {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn analysis(msg: impl Into<String>) -> Self {
        Error::Analysis(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem or file contents.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::Format { .. } | Error::Wav { .. } | Error::Json(_) | Error::Csv(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
