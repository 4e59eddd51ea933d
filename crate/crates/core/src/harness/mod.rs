//! Experiment plumbing: random streams, replicate fan-out, slope fitting,
//! configuration, and report serialization.

pub mod config;
pub mod experiments;
pub mod par;
pub mod rng;
pub mod slope;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{configured_threads, run_experiment, run_experiment_with_threads, ExperimentReport};
pub use rng::{make_rng_stream, RngStream};
pub use slope::{fit_loglog_slope, SlopeFit};
