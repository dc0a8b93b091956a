use market_mill::MillError;

/// CLI failure with a stable exit-code contract: 2 for configuration
/// problems, 3 for file and data I/O, 4 for numerical or statistical
/// failures on otherwise valid inputs.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

/// Library errors split by origin: bad parameters are config errors, the
/// rest are numerical/statistical outcomes.
impl From<MillError> for CliError {
    fn from(e: MillError) -> Self {
        match e {
            MillError::InvalidConfig(_) | MillError::GridNotReflectionClosed(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Wraps a std::io error with the path it concerns.
pub fn io_err(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
