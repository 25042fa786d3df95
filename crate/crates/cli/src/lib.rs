//! Experiment runner: configs, sampled sources, artifact formats and the
//! five experiments behind the `ridgelab` binary.

// `!(x <= bound)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod io;
pub mod report;
pub mod source;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use experiments::{run, RunError};
pub use report::{Check, Report};
