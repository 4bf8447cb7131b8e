use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] sumprod::Error),
    /// An asserted check failed; the report was still written.
    #[error("asserted check failed: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        use sumprod::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Core(E::Parse(_)) => 2,
            CliError::Core(E::Domain(_) | E::NotFound(_)) => 3,
            CliError::Core(E::CertificateInvalid(_) | E::Internal(_)) => 4,
            CliError::Invariant(_) => 4,
            CliError::Core(E::Budget(_)) => 5,
        }
    }
}
