//! Experiment configuration: one JSON document per run, stored next to the
//! outputs.  Every field has a per-experiment default, so `{}` plus the
//! experiment name is a complete config.

use std::path::{Path, PathBuf};

use ridgelab_core::advection::Hyperplane;
use ridgelab_core::frame::{BankSpec, Profile, SIGMA_DEFAULT};
use ridgelab_core::geometry::Direction;
use ridgelab_core::grid::GridSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid value for {field}: {reason}")]
    Value { field: &'static str, reason: String },
}

fn bad(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { field, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Parseval,
    Nterm,
    AngleLoc,
    Advect,
    ImnVerify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Parseval => "parseval",
            Experiment::Nterm => "nterm",
            Experiment::AngleLoc => "angle-loc",
            Experiment::Advect => "advect",
            Experiment::ImnVerify => "imn-verify",
        }
    }
}

/// Function families a run can analyze or solve for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    /// Seeded sums of Gaussian wave packets, band-limited well below `2^J`.
    WavePackets {
        fields: usize,
        packets: usize,
        /// Largest packet frequency as a fraction of `2^J`.
        max_freq: f64,
    },
    /// `exp(-a |x - c|²)`.
    Gaussian { a: f64, center: [f64; 2] },
    /// Box `|y₁|, |y₂| < half_width` (in coordinates rotated by `angle`)
    /// times `exp(-gauss |y|²)`, built from its exact spectrum.  With
    /// `transported`, the source is instead the solution of the transport
    /// equation with that right-hand side, constant absorption and the
    /// configured direction.
    BoxGaussian { angle: f64, half_width: f64, gauss: f64, transported: bool },
    /// `g₀ + Σ gᵢ H(x·nᵢ - vᵢ)` with Gaussian `g₀ = base·exp(-a|x|²)`,
    /// `gᵢ = exp(-a|x|²)`.
    Mutilated { a: f64, base: f64, hyperplanes: Vec<Hyperplane> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AbsorptionSpec {
    Constant { value: f64 },
    /// `base + amplitude·sin²(x₁x₂)`, lower bound `gamma`.
    SinSquared { base: f64, amplitude: f64, gamma: f64 },
}

impl AbsorptionSpec {
    pub fn gamma(&self) -> f64 {
        match *self {
            AbsorptionSpec::Constant { value } => value,
            AbsorptionSpec::SinSquared { gamma, .. } => gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImnSpec {
    pub m_max: u32,
    pub n_max: u32,
    pub samples: usize,
    /// Relative tolerance of the quadrature path.
    pub tol: f64,
}

impl Default for ImnSpec {
    fn default() -> Self {
        ImnSpec { m_max: 6, n_max: 6, samples: 200, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NtermSpec {
    /// Curve sizes run from `2^log2_min` to `2^log2_max`.
    pub log2_min: u32,
    pub log2_max: u32,
    pub per_octave: u32,
    /// Fit window for the decay exponent of the rearranged coefficients.
    pub fit_window: (usize, usize),
}

impl Default for NtermSpec {
    fn default() -> Self {
        NtermSpec { log2_min: 4, log2_max: 14, per_octave: 4, fit_window: (100, 10_000) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSpec {
    pub top_k: usize,
    pub j_min: u32,
}

impl Default for AngleSpec {
    fn default() -> Self {
        AngleSpec { top_k: 1000, j_min: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub grid: GridSpec,
    pub bank: BankSpec,
    pub source: SourceSpec,
    /// Angle of the transport direction `s`.
    pub transport_angle: f64,
    pub absorption: AbsorptionSpec,
    /// Smoothness `t` of the benchmark exponent `p* = (t/2 + 1/2)^{-1}`.
    pub smoothness: f64,
    /// Tail-set parameter.
    pub delta: f64,
    pub output: PathBuf,
    pub seed: u64,
    #[serde(default)]
    pub imn: ImnSpec,
    #[serde(default)]
    pub nterm: NtermSpec,
    #[serde(default)]
    pub angle: AngleSpec,
    /// Also write the full coefficient set (large for fine grids).
    #[serde(default)]
    pub dump_coefficients: bool,
}

/// A config file may omit anything but the experiment name.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    experiment: Option<Experiment>,
    grid: Option<GridSpec>,
    bank: Option<BankSpec>,
    source: Option<SourceSpec>,
    transport_angle: Option<f64>,
    absorption: Option<AbsorptionSpec>,
    smoothness: Option<f64>,
    delta: Option<f64>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    imn: Option<ImnSpec>,
    nterm: Option<NtermSpec>,
    angle: Option<AngleSpec>,
    dump_coefficients: Option<bool>,
}

/// The box×Gaussian transport solution used by the rate and angle runs.
fn ridge_source() -> SourceSpec {
    SourceSpec::BoxGaussian { angle: 0.3, half_width: 0.6, gauss: 4.0, transported: true }
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (grid, j_max) = match experiment {
            Experiment::Parseval => (GridSpec { l: 2.0, n: 256 }, 5),
            Experiment::Nterm | Experiment::AngleLoc => (GridSpec { l: 2.0, n: 512 }, 7),
            Experiment::Advect => (GridSpec { l: 2.0, n: 512 }, 7),
            Experiment::ImnVerify => (GridSpec { l: 2.0, n: 64 }, 4),
        };
        let source = match experiment {
            Experiment::Parseval => SourceSpec::WavePackets { fields: 5, packets: 5, max_freq: 0.6 },
            Experiment::Nterm | Experiment::AngleLoc => ridge_source(),
            Experiment::Advect => SourceSpec::Mutilated {
                a: 2.0,
                base: 0.2,
                hyperplanes: vec![Hyperplane { n: Direction::from_angle(0.4 + std::f64::consts::FRAC_PI_2), v: 0.13 }],
            },
            Experiment::ImnVerify => SourceSpec::Gaussian { a: std::f64::consts::PI, center: [0.0, 0.0] },
        };
        let absorption = match experiment {
            Experiment::Advect => AbsorptionSpec::SinSquared { base: 1.0, amplitude: 0.5, gamma: 1.0 },
            _ => AbsorptionSpec::Constant { value: 5.0 },
        };
        ExperimentConfig {
            experiment,
            grid,
            bank: BankSpec { j_max, sigma: SIGMA_DEFAULT, profile: Profile::C2Poly },
            source,
            transport_angle: if experiment == Experiment::Advect { 0.4 } else { 0.3 },
            absorption,
            smoothness: 2.0,
            delta: 0.5,
            output: PathBuf::from("runs").join(experiment.name()),
            seed: 1,
            imn: ImnSpec::default(),
            nterm: NtermSpec::default(),
            angle: AngleSpec::default(),
            dump_coefficients: false,
        }
    }

    /// Parse a JSON config; `experiment` may come from the command line
    /// instead of the file.
    pub fn from_json(text: &str, experiment: Option<Experiment>) -> Result<Self, ConfigError> {
        let p: PartialConfig = serde_json::from_str(text)?;
        let exp = match (experiment, p.experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(bad("experiment", format!("file says {} but {} was requested", b.name(), a.name())))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(bad("experiment", "missing")),
        };
        let d = ExperimentConfig::defaults(exp);
        let c = ExperimentConfig {
            experiment: exp,
            grid: p.grid.unwrap_or(d.grid),
            bank: p.bank.unwrap_or(d.bank),
            source: p.source.unwrap_or(d.source),
            transport_angle: p.transport_angle.unwrap_or(d.transport_angle),
            absorption: p.absorption.unwrap_or(d.absorption),
            smoothness: p.smoothness.unwrap_or(d.smoothness),
            delta: p.delta.unwrap_or(d.delta),
            output: p.output.unwrap_or(d.output),
            seed: p.seed.unwrap_or(d.seed),
            imn: p.imn.unwrap_or(d.imn),
            nterm: p.nterm.unwrap_or(d.nterm),
            angle: p.angle.unwrap_or(d.angle),
            dump_coefficients: p.dump_coefficients.unwrap_or(d.dump_coefficients),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path, experiment: Option<Experiment>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_json(&text, experiment)
    }

    pub fn transport(&self) -> Direction {
        Direction::from_angle(self.transport_angle)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.grid.validate().map_err(|e| bad("grid", e.to_string()))?;
        if self.bank.j_max == 0 || self.bank.j_max > 12 {
            return Err(bad("bank.j_max", format!("{} not in 1..=12", self.bank.j_max)));
        }
        if !self.bank.sigma.iter().all(|s| *s > 0.0 && *s <= 1.0) {
            return Err(bad("bank.sigma", format!("{:?} must lie in (0, 1]", self.bank.sigma)));
        }
        if !self.transport_angle.is_finite() {
            return Err(bad("transport_angle", "not finite"));
        }
        let g = self.absorption.gamma();
        if !(g > 0.0) {
            return Err(bad("absorption", format!("lower bound {g} must be positive")));
        }
        if let AbsorptionSpec::SinSquared { base, amplitude, gamma } = self.absorption {
            if base.min(base + amplitude) < gamma {
                return Err(bad("absorption", "base + amplitude·sin² drops below gamma"));
            }
        }
        match &self.source {
            SourceSpec::WavePackets { fields, packets, max_freq } => {
                if *fields == 0 || *packets == 0 || !(*max_freq > 0.0 && *max_freq <= 1.0) {
                    return Err(bad("source", "wave packets need fields, packets > 0 and 0 < max_freq <= 1"));
                }
            }
            SourceSpec::Gaussian { a, .. } | SourceSpec::Mutilated { a, .. } if !(*a > 0.0) => {
                return Err(bad("source.a", "must be positive"));
            }
            SourceSpec::BoxGaussian { half_width, gauss, transported, .. } => {
                if !(*half_width > 0.0 && *half_width < self.grid.l) || !(*gauss >= 0.0) {
                    return Err(bad("source", "box needs 0 < half_width < L and gauss >= 0"));
                }
                if *transported && !matches!(self.absorption, AbsorptionSpec::Constant { .. }) {
                    return Err(bad("absorption", "the transported box source needs constant absorption"));
                }
            }
            _ => {}
        }
        if !(self.smoothness > 0.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(bad("smoothness/delta", "need t > 0 and 0 < delta < 1"));
        }
        let im = &self.imn;
        if im.m_max == 0 || im.n_max == 0 || im.m_max > 8 || im.n_max > 8 || im.samples == 0 || !(im.tol > 0.0) {
            return Err(bad("imn", "need 1 <= m_max, n_max <= 8, samples > 0, tol > 0"));
        }
        let nt = &self.nterm;
        if nt.log2_min >= nt.log2_max || nt.per_octave == 0 || nt.log2_max > 24 {
            return Err(bad("nterm", "need log2_min < log2_max <= 24 and per_octave > 0"));
        }
        if nt.fit_window.0 < 1 || nt.fit_window.1 < nt.fit_window.0 + 9 {
            return Err(bad("nterm.fit_window", "need 1 <= n1 and n2 >= n1 + 9"));
        }
        if self.angle.top_k == 0 || self.angle.j_min > self.bank.j_max {
            return Err(bad("angle", "need top_k > 0 and j_min <= J"));
        }
        Ok(())
    }
}
