use std::process::ExitCode;

use sepx_core::evolve::EvolveError;
use sepx_core::ged::GedError;
use sepx_core::lbei::LbeiError;
use sepx_core::operators::OperatorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Capacity(_) => 4,
        })
    }

    pub fn input(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{context}: {err}"))
    }
}

impl From<GedError> for CliError {
    fn from(e: GedError) -> Self {
        match e {
            GedError::Capacity { .. } => CliError::Capacity(e.to_string()),
            GedError::Graph(g) => CliError::Input(g.to_string()),
        }
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Ged(g) => g.into(),
            OperatorError::Config(msg) => CliError::Usage(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::Ged(g) => g.into(),
            EvolveError::Operator(o) => o.into(),
            EvolveError::Config(msg) => CliError::Usage(msg),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<LbeiError> for CliError {
    fn from(e: LbeiError) -> Self {
        CliError::Usage(e.to_string())
    }
}
