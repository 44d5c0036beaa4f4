use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("incomplete: {0}")]
    Incomplete(String),
    #[error("{}: {error}", path.display())]
    Io { path: PathBuf, error: std::io::Error },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, error: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            error,
        }
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCOMPLETE: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// Process exit code for an error, from the first recognised cause.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use systole_core::Error as Core;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Verification(_) => EXIT_VERIFY,
                CliError::Incomplete(_) => EXIT_INCOMPLETE,
                CliError::Io { .. } => EXIT_IO,
            };
        }
        if let Some(e) = cause.downcast_ref::<Core>() {
            return match e {
                Core::Domain(_) => EXIT_USAGE,
                Core::Resource { .. } | Core::Incomplete(_) | Core::Overflow(_) => EXIT_INCOMPLETE,
                _ => EXIT_VERIFY,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_VERIFY
}
