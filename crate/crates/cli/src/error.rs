use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: mxparse::Error },

    #[error("{0}")]
    Mismatch(String),

    #[error("archive: {0}")]
    Archive(String),

    #[error(transparent)]
    Data(#[from] mxparse::Error),

    #[error("output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    /// Process exit status for this error: 1 for usage errors, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub(crate) fn input(path: impl Into<PathBuf>) -> impl FnOnce(mxparse::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Input { path, source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
