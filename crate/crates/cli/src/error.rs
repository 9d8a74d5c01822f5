use std::io;
use std::path::Path;

use deuteron_core::fitting::FitError;
use deuteron_core::validation::ValidationError;
use deuteron_core::{ObservablesError, ParamsError};
use thiserror::Error;

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Params(_) | CliError::Config(_) => EXIT_INVALID,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } | CliError::Csv(_) => EXIT_IO,
        }
    }
}

impl From<ObservablesError> for CliError {
    fn from(e: ObservablesError) -> Self {
        match e {
            ObservablesError::Params(p) => CliError::Params(p),
            ObservablesError::Ratio(_) | ObservablesError::UnequalRanges { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Observables(o) => o.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        match e {
            ValidationError::Observables(o) => o.into(),
            ValidationError::Transform(t) => CliError::Numerical(t.to_string()),
        }
    }
}
