use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ridgelab::{run, ConfigError, Experiment, ExperimentConfig};
use ridgelab_core::frame::Profile;

/// Run one ridgelab experiment and check its acceptance criteria.
///
/// Exit status: 0 when every check passes, 1 when one fails, 2 for
/// unreadable or invalid configuration.
#[derive(Debug, Parser)]
#[command(name = "ridgelab", version)]
struct Cli {
    experiment: Experiment,
    /// JSON config; fields left out take the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Samples per axis.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Half-width of the periodic box.
    #[arg(long = "L")]
    l: Option<f64>,
    /// Finest scale of the window bank.
    #[arg(long = "J")]
    j: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_profile)]
    profile: Option<Profile>,
    /// Transport direction angle in radians.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    j_min: Option<u32>,
    /// Also write every coefficient (CSV and binary).
    #[arg(long)]
    dump_coefficients: bool,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| format!("unknown profile {s:?} (c2-poly, smooth)"))
}

fn config(cli: &Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut c = match &cli.config {
        Some(p) => ExperimentConfig::from_file(p, Some(cli.experiment))?,
        None => ExperimentConfig::defaults(cli.experiment),
    };
    if let Some(v) = &cli.out {
        c.output = v.clone();
    }
    if let Some(v) = cli.n {
        c.grid.n = v;
    }
    if let Some(v) = cli.l {
        c.grid.l = v;
    }
    if let Some(v) = cli.j {
        c.bank.j_max = v;
    }
    if let Some(v) = cli.seed {
        c.seed = v;
    }
    if let Some(v) = cli.profile {
        c.bank.profile = v;
    }
    if let Some(v) = cli.theta {
        c.transport_angle = v;
    }
    if let Some(v) = cli.m_max {
        c.imn.m_max = v;
    }
    if let Some(v) = cli.n_max {
        c.imn.n_max = v;
    }
    if let Some(v) = cli.samples {
        c.imn.samples = v;
    }
    if let Some(v) = cli.tol {
        c.imn.tol = v;
    }
    if let Some(v) = cli.top_k {
        c.angle.top_k = v;
    }
    if let Some(v) = cli.j_min {
        c.angle.j_min = v;
    }
    c.dump_coefficients |= cli.dump_coefficients;
    c.validate()?;
    Ok(c)
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("RIDGELAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("RIDGELAB_THREADS={v:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("{tag} [{:>2}] {:<40} {:.6e} {} {:e}", c.criterion, c.name, c.value, c.relation, c.bound);
    }
    println!("outputs in {}", cfg.output.display());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
