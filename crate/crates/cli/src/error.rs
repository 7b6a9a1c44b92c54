use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

pub const EXIT_SUITE_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_UNDETERMINED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] extremaldep::Error),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("EXTREMALDEP_THREADS: {0}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(e) if e.is_insufficient_data() => ExitCode::from(EXIT_UNDETERMINED),
            _ => ExitCode::from(EXIT_INVALID),
        }
    }
}
