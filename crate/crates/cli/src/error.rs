use std::process::ExitCode;

use zerostab_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Verification(String),

    #[error("scheme is not zero-stable")]
    NotZeroStable,

    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 64,
            CliError::Verification(_) | CliError::Runtime(_) => 1,
            CliError::NotZeroStable => 2,
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidScheme(_) | Error::InvalidArgument(_) | Error::Domain(_) | Error::EmptyGrid => {
                CliError::Usage(e.to_string())
            }
            Error::NoConvergence { .. } | Error::BlowUp { .. } => CliError::Runtime(e.into()),
        }
    }
}
