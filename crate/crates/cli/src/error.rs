use std::path::PathBuf;

use thiserror::Error;

/// Failures of the driver itself, plus library errors passed through.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] tubelab::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CONDITION: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

/// Exit code for a library error: bad input and guards map to 2, violated
/// mathematical conditions to 3, series that fail to converge to 4.
pub fn core_exit_code(e: &tubelab::Error) -> i32 {
    use tubelab::Error::*;
    match e {
        Condition(_) | Axiom { .. } => EXIT_CONDITION,
        Convergence { .. } => EXIT_CONVERGENCE,
        NonFinite(_) | DimensionMismatch { .. } | NotUnit { .. } | NotOrthogonal { .. } | Symmetry { .. }
        | Guard { .. } | Unsupported(_) | Parse(_) => EXIT_CONFIG,
    }
}
