use std::path::PathBuf;

use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] spli_core::config::ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Input(#[from] spli_core::geojson::IngestError),
    #[error("stage `{stage}` failed: {reason}")]
    Stage { stage: &'static str, reason: String },
    #[error("cannot write {path}: {reason}")]
    Output { path: PathBuf, reason: String },
}

impl CliError {
    /// 2 config or usage, 3 unreadable input, 4 stage failure, 5 output failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Stage { .. } => 4,
            CliError::Output { .. } => 5,
        }
    }

    pub fn stage(stage: &'static str, reason: impl ToString) -> CliError {
        CliError::Stage {
            stage,
            reason: reason.to_string(),
        }
    }

    pub fn output(path: impl Into<PathBuf>, reason: impl ToString) -> CliError {
        CliError::Output {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
