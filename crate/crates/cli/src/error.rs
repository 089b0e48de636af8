use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}: {message}")]
    Parse { file: String, message: String },
    #[error("{file}:{line}: {err}")]
    At {
        file: String,
        line: usize,
        err: cusp_core::Error,
    },
    #[error("{file}: {err}")]
    InFile { file: String, err: cusp_core::Error },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for configuration and precondition failures, 3 for numerical-domain
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::At { err, .. } | CliError::InFile { err, .. } => match err {
                cusp_core::Error::Domain(_) => 3,
                _ => 2,
            },
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
