//! CLI error type: every failure surfaces as one diagnostic line.

use polarity_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A malformed line in an input file.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// A file-level problem (unreadable, bad header, truncated).
    #[error("{path}: {message}")]
    File { path: String, message: String },

    /// Flags that cannot be combined or values out of range.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    pub fn parse(path: &std::path::Path, line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn file(path: &std::path::Path, message: impl Into<String>) -> Self {
        CliError::File {
            path: path.display().to_string(),
            message: message.into(),
        }
    }
}
