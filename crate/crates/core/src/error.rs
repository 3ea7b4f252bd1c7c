use serde::Serialize;
use thiserror::Error;

/// Failures reported by the library. Every variant carries enough context to
/// be rendered as a diagnostic record by the command-line driver.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum Error {
    /// Total conformal mass of the model is infinite or not positive.
    #[error("model mass diverges: {reason}")]
    DivergentModel { reason: String },

    /// The weighted series diverges at the requested parameters.
    #[error("series diverges at u = {u}, s = {s} (convergence abscissa estimate {abscissa})")]
    DivergentSeries { u: f64, s: f64, abscissa: f64 },

    #[error("integration failed: {reason}")]
    IntegrationFailure { reason: String },

    #[error("configuration error: {reason}")]
    ConfigError { reason: String },

    #[error("invalid Dyck word at position {position}: {reason}")]
    InvalidDyck { position: usize, reason: String },

    #[error("numerical failure: {reason}")]
    NumericalFailure { reason: String },
}

impl Error {
    pub fn config(reason: impl Into<String>) -> Self {
        Error::ConfigError {
            reason: reason.into(),
        }
    }

    pub fn numerical(reason: impl Into<String>) -> Self {
        Error::NumericalFailure {
            reason: reason.into(),
        }
    }

    pub fn integration(reason: impl Into<String>) -> Self {
        Error::IntegrationFailure {
            reason: reason.into(),
        }
    }

    pub fn divergent_model(reason: impl Into<String>) -> Self {
        Error::DivergentModel {
            reason: reason.into(),
        }
    }

    /// True for errors caused by invalid input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::ConfigError { .. } | Error::InvalidDyck { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
