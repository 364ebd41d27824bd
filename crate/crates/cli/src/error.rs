use thiserror::Error;

/// Failures of a CLI command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] ruinwerk::Error),

    #[error("{failed} validation check(s) failed")]
    ChecksFailed { failed: usize },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ruinwerk::Error as E;
        match self {
            CliError::ChecksFailed { .. } => EXIT_CHECK_FAILED,
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::InvalidModel(_) | E::NetProfit { .. } | E::InvalidArgument(_) | E::Unsupported(_) => EXIT_CONFIG,
                E::GridMismatch(_) | E::Domain(_) | E::Numerical(_) | E::InsufficientSamples { .. } => EXIT_NUMERICAL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
