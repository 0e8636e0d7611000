//! Experiment driver behind the `dkg-lab` binary: configuration, validation
//! and the named experiments.

pub mod config;
pub mod error;
pub mod experiments;

pub use config::{ConfigIssue, Experiment, ExperimentConfig};
pub use error::LabError;
pub use experiments::{fitted_order, run, Outcome};

/// Environment variable capping the worker threads used by sweeps.
pub const THREADS_ENV: &str = "DKG_LAB_THREADS";
