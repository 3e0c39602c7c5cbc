use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] nhspec_core::Error),

    #[error("output failed: {0}")]
    Io(#[from] std::io::Error),

    /// A verification suite failed or a printed formula was contradicted by
    /// the root scan. The report has already been written.
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
