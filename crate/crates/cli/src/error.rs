use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in {}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Experiment(#[from] dgsim_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid DGSIM_THREADS value {0:?}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Threads(_) => 2,
            _ => 1,
        }
    }
}
