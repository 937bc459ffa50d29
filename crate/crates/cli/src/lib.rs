//! Scenario files, presets and the commands behind the `risbeam` binary.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;
pub mod presets;

pub use config::{load_config, FileConfig};

/// Failure of a command, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(risbeam_core::Error),
    #[error(transparent)]
    Numerical(risbeam_core::Error),
    #[error("io error: {0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<risbeam_core::Error> for CliError {
    fn from(e: risbeam_core::Error) -> Self {
        match e {
            risbeam_core::Error::Config { .. } => CliError::Config(e),
            _ => CliError::Numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
