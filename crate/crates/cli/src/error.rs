use thiserror::Error;

/// Failures surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Game(#[from] partnership::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    /// 1 for usage and validation problems, 2 for failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
