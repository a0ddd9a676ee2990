//! Error categories mapped to process exit codes: validation errors exit
//! with 1, I/O errors with 2, internal invariant violations with 3.

use boxrules_core::evolution::EvolutionError;
use boxrules_core::rule::ModelError;
use boxrules_core::DatasetError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EvolutionError> for CliError {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            // anything else escaping a validated run is an engine bug
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Prediction-time model errors are internal: consistent models cannot
/// produce conflicting coverage.
pub fn internal_model_error(e: ModelError) -> CliError {
    CliError::Internal(e.to_string())
}
