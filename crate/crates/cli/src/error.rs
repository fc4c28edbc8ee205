use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const CONFIG: i32 = 2;
    pub const NUMERICS: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Numerics(#[from] hubkin::Error),
    /// A run finished with a numerical failure recorded in its manifest.
    #[error("run failed: {0}")]
    RunFailed(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => exit::CONFIG,
            CliError::Numerics(
                hubkin::Error::InvalidGrid { .. } | hubkin::Error::InvalidParameter { .. },
            ) => exit::CONFIG,
            CliError::Numerics(_) | CliError::RunFailed(_) => exit::NUMERICS,
            CliError::Io { .. } => exit::IO,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
