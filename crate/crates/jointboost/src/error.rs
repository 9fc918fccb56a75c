//! Errors of the std layer and their process exit codes.

use std::path::PathBuf;

use jointboost_core::boosting::BoostError;
use jointboost_core::simulation::SimulationError;
use jointboost_core::tuning::TuningError;
use jointboost_core::ValidationError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}{}{}: {message}", .row.map(|r| format!(", row {r}")).unwrap_or_default(), .column.as_ref().map(|c| format!(", column {c}")).unwrap_or_default())]
    Schema {
        path: PathBuf,
        /// 1-based data row, header excluded.
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Fit(#[from] BoostError),
    #[error(transparent)]
    Tuning(#[from] TuningError),
    #[error("serializing report: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// 2 for numerical failures, 1 for every other error.
    pub fn exit_code(&self) -> i32 {
        let numerical = |e: &BoostError| matches!(e, BoostError::NonFinite { .. } | BoostError::AlphaSearch { .. } | BoostError::ZeroExposure);
        match self {
            Error::Fit(e) | Error::Tuning(TuningError::Fit(e)) if numerical(e) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
