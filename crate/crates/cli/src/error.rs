use std::path::PathBuf;
use std::process::ExitCode;

use sigmapi::{DomainViolation, OracleError, ParseError, QuadratizeError, SeriesError};
use thiserror::Error;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{}", path.display(), source)]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Numeric(_) => 4,
        })
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        use SeriesError::*;
        let msg = e.to_string();
        match e {
            ZeroComponent { .. } | DomainExit { .. } => CliError::Domain(msg),
            DimensionMismatch { .. } | ComponentOutOfRange { .. } | OrderTooLarge { .. } | InvalidPolicy(_) => {
                CliError::Input(msg)
            }
            OrderBudget { .. }
            | NotStationary
            | OutOfRadius { .. }
            | StepLimit { .. }
            | Divergence { .. }
            | MixedCenters { .. } => CliError::Numeric(msg),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        let msg = format!("reference integrator: {e}");
        match e {
            OracleError::DomainExit { .. } => CliError::Domain(msg),
            OracleError::Blowup { .. } => CliError::Numeric(msg),
            _ => CliError::Input(msg),
        }
    }
}

impl From<DomainViolation> for CliError {
    fn from(e: DomainViolation) -> Self {
        CliError::Domain(format!("initial point outside the domain: {e}"))
    }
}

impl From<QuadratizeError> for CliError {
    fn from(e: QuadratizeError) -> Self {
        CliError::Input(e.to_string())
    }
}
