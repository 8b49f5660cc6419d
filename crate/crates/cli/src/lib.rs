//! Config-driven experiment runner for the `dephasing` library.
//!
//! Each subcommand turns an [`ExperimentConfig`](config::ExperimentConfig)
//! into a versioned CSV table. Sweep points are evaluated independently and
//! written in grid order, so identical configs give byte-identical output.

pub mod commands;
pub mod config;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 2 validation, 3 non-convergence, 4 oracle mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::OracleMismatch(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Classifies a library error raised while evaluating `context`.
    pub fn from_lib(context: &str, e: dephasing::Error) -> Self {
        use dephasing::Error as E;
        match e {
            E::NotConvergent(_) | E::NonIntegrable(_) | E::DimensionCap { .. } => CliError::Numeric(format!("{context}: {e}")),
            _ => CliError::Validation(format!("{context}: {e}")),
        }
    }
}
