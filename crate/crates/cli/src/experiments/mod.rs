//! Experiment drivers.  Each one fills a [`Report`] and writes its artifacts
//! under the configured output directory; [`run`] adds `config.json` and
//! `summary.json`.

mod advect;
mod angle_loc;
mod imn_verify;
mod nterm;
mod parseval;

use std::time::Instant;

use ridgelab_core::advection::AdvectionError;
use ridgelab_core::frame::{FrameError, WindowBank};
use ridgelab_core::imn::ImnError;
use ridgelab_core::seqspace::SeqError;
use ridgelab_core::xform::XformError;
use thiserror::Error;

use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::io::{write_json, IoError};
use crate::report::Report;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Xform(#[from] XformError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Advection(#[from] AdvectionError),
    #[error(transparent)]
    Imn(#[from] ImnError),
}

impl RunError {
    /// Bad inputs exit with 2 like parse errors; anything else is a failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e.into())
    }
}

/// A bank the grid cannot support is a configuration problem.
fn build_bank(cfg: &ExperimentConfig) -> Result<WindowBank, RunError> {
    WindowBank::build(cfg.bank, cfg.grid).map_err(|e| match e {
        FrameError::Resolution { .. } | FrameError::BadSpec(_) => {
            RunError::Config(ConfigError::Value { field: "bank", reason: e.to_string() })
        }
        other => other.into(),
    })
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    let out = cfg.output.as_path();
    std::fs::create_dir_all(out)?;
    write_json(&out.join("config.json"), cfg)?;
    let start = Instant::now();
    let mut report = match cfg.experiment {
        Experiment::Parseval => parseval::run(cfg, out),
        Experiment::Nterm => nterm::run(cfg, out),
        Experiment::AngleLoc => angle_loc::run(cfg, out),
        Experiment::Advect => advect::run(cfg, out),
        Experiment::ImnVerify => imn_verify::run(cfg, out),
    }?;
    report.metric("elapsed_seconds", start.elapsed().as_secs_f64());
    write_json(&out.join("summary.json"), &report)?;
    Ok(report)
}

