//! Failure kinds of the `ks` tool and their exit codes.

use std::path::PathBuf;

/// Success.
pub const EXIT_OK: u8 = 0;
/// `verify` found at least one failing suite.
pub const EXIT_VERIFY_FAILED: u8 = 1;
/// Bad input: domain, range or usage error.
pub const EXIT_DOMAIN: u8 = 2;
/// A computation did not converge or missed its accuracy target.
pub const EXIT_CONVERGENCE: u8 = 3;
/// Output could not be written.
pub const EXIT_IO: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ks_core::Error),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("failing suites: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use ks_core::Error as E;
        match self {
            CliError::Core(E::Domain(_) | E::Range { .. } | E::InsufficientData(_)) => EXIT_DOMAIN,
            CliError::Core(E::Convergence { .. } | E::Accuracy { .. } | E::Internal(_)) => {
                EXIT_CONVERGENCE
            }
            CliError::Usage(_) | CliError::Csv(_) => EXIT_DOMAIN,
            CliError::Io { .. } => EXIT_IO,
            CliError::VerifyFailed(_) => EXIT_VERIFY_FAILED,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
