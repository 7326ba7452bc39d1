//! File formats and commands behind the `hessone` binary.

pub mod bundle;
pub mod config;
pub mod export;
pub mod run;

use std::path::Path;

use thiserror::Error;

pub use bundle::SolutionBundle;
pub use config::{GridSpec, Mode, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Input(hessone_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("solver failure: {0}")]
    Solver(hessone_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl From<hessone_core::Error> for CliError {
    fn from(e: hessone_core::Error) -> Self {
        CliError::Input(e)
    }
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Input(_) | CliError::Io { .. } => 1,
            CliError::Solver(_) | CliError::Failed(_) => 2,
        }
    }
}
