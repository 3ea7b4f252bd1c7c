//! Experiment driver for `plab-core`: configuration, the fifteen experiments
//! and their reports. The `plab` binary is a thin shell over [`run`].

pub mod config;
pub mod experiments;
pub mod report;

use std::fmt;

use serde::Serialize;

pub use config::{Experiment, ExperimentConfig, FileConfig, Grid, Params};
pub use report::{Check, CsvTable, Report};

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunError {
    /// Invalid parameters or configuration file (exit code 2).
    Config { reason: String },
    /// A computation failed (exit code 3).
    Numerical { reason: String, detail: Option<plab_core::Error> },
    /// Output could not be written.
    Io { reason: String },
}

impl RunError {
    pub fn config(reason: impl Into<String>) -> Self {
        RunError::Config { reason: reason.into() }
    }

    pub fn numerical(reason: impl Into<String>) -> Self {
        RunError::Numerical { reason: reason.into(), detail: None }
    }

    pub fn io<E: fmt::Display>(e: E) -> Self {
        RunError::Io { reason: e.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Numerical { .. } => 3,
            RunError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config { reason } => write!(f, "configuration error: {reason}"),
            RunError::Numerical { reason, .. } => write!(f, "numerical failure: {reason}"),
            RunError::Io { reason } => write!(f, "i/o error: {reason}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<plab_core::Error> for RunError {
    fn from(e: plab_core::Error) -> Self {
        use plab_core::Error as E;
        // the variant already says what kind of failure this is
        let reason = match &e {
            E::ConfigError { reason } | E::NumericalFailure { reason } => reason.clone(),
            other => other.to_string(),
        };
        if e.is_config() {
            RunError::config(reason)
        } else {
            RunError::Numerical { reason, detail: Some(e) }
        }
    }
}

/// Runs one experiment in the current rayon pool.
pub fn run(config: &ExperimentConfig) -> Result<Report, RunError> {
    experiments::dispatch(config.experiment, &config.params)
}

/// Runs one experiment on a dedicated pool of `threads` workers (or the
/// global pool when `None`). Output does not depend on the thread count.
pub fn run_with_threads(config: &ExperimentConfig) -> Result<Report, RunError> {
    match config.threads {
        Some(0) => Err(RunError::config("threads must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::config(format!("thread pool: {e}")))?
            .install(|| run(config)),
        None => run(config),
    }
}
