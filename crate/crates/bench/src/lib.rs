//! Experiment harness around `mnls-core`: a catalog of named experiments,
//! JSON run configurations, structured output bundles, manageability sweeps
//! and quick-look SVG plots.

pub mod catalog;
pub mod config;
mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod snapshot;
pub mod sweep;

pub use config::{Overrides, Prepared, ProfileConfig, RunConfig};
pub use error::{BenchError, Result};
pub use run::{construct, execute, run_experiment, Outcome, Status};
pub use sweep::{sweep_manageability, ManageabilityCriterion, SweepSpec};

/// Harness version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
