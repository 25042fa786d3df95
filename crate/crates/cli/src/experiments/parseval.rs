//! Frame diagnostics: partition of unity, energy preservation on seeded
//! band-limited fields, the fast transform against direct summation,
//! analysis/synthesis duality, and the scale behaviour of a Gaussian's
//! coefficient tails.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ridgelab_core::frame::{BankSpec, WindowBank};
use ridgelab_core::grid::{GridFunction, GridSpec};
use ridgelab_core::xform::{analyze, analyze_direct, parseval_defect, synthesize, CoefficientSet};
use ridgelab_core::Complex64;
use serde::Serialize;

use super::{build_bank, RunError};
use crate::config::ExperimentConfig;
use crate::io::{write_coefficients_bin, write_coefficients_csv, write_grid_bin, write_grid_csv, write_json, write_table};
use crate::report::{Check, Report};
use crate::source;

/// The oracle comparison always runs on this small bank.
const ORACLE: (f64, usize, u32) = (2.0, 32, 3);
const TAIL_SCALES: u32 = 5;

#[derive(Serialize)]
struct FieldRow {
    field: usize,
    seed: u64,
    norm: f64,
    coefficient_energy: f64,
    defect: f64,
    round_trip: f64,
}

#[derive(Serialize)]
struct TailRow {
    j: u32,
    constant: f64,
}

fn rel_diff(a: &CoefficientSet, b: &CoefficientSet) -> f64 {
    let d: f64 = a.iter().zip(b.iter()).map(|((_, x), (_, y))| (x - y).norm_sqr()).sum();
    (d / b.norm_sqr()).sqrt()
}

/// `max_λ |c_λ| 2^{j/2} ((k₁/2^j)² + k₂² + 1)²` per scale, with `k` in
/// lattice units `σ ∘ k` so the weight measures distance, not index.
fn tail_constants(c: &CoefficientSet, bank: &WindowBank, top: u32) -> Vec<f64> {
    let mut out = vec![0.0f64; top as usize + 1];
    for (lam, v) in c.iter().filter(|(lam, _)| lam.j <= top) {
        let sigma = bank.window(lam.j, lam.l).expect("coefficient of this bank").sigma;
        let tj = (lam.j as f64).exp2();
        let k1 = sigma[0] * lam.k[0] as f64 / tj;
        let k2 = sigma[1] * lam.k[1] as f64;
        let w = tj.sqrt() * (k1 * k1 + k2 * k2 + 1.0).powi(2);
        let e = &mut out[lam.j as usize];
        *e = e.max(v.norm() * w);
    }
    out
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let mut rep = Report::new("parseval");
    let bank = build_bank(cfg)?;
    write_json(&out.join("bank.json"), &bank.describe())?;
    rep.check(Check::at_most(6, "partition_defect", bank.partition_defect(), 1e-12));

    let fields = source::sample(cfg);
    let mut rows = Vec::with_capacity(fields.len());
    for (i, f) in fields.iter().enumerate() {
        let c = analyze(f, &bank)?;
        let norm = f.l2_norm();
        let rt = synthesize(&c, &bank)?.sub(f).l2_norm() / norm;
        rows.push(FieldRow {
            field: i,
            seed: cfg.seed.wrapping_add(i as u64),
            norm,
            coefficient_energy: c.norm_sqr(),
            defect: parseval_defect(f, &bank)?,
            round_trip: rt,
        });
        if i == 0 {
            write_grid_bin(&out.join("field0.bin"), f)?;
            write_grid_csv(&out.join("field0.csv"), f)?;
            let mut sorted = c.sorted();
            sorted.truncate(1000);
            write_coefficients_csv(&out.join("top_coefficients.csv"), &sorted)?;
            if cfg.dump_coefficients {
                let all: Vec<_> = c.iter().collect();
                write_coefficients_csv(&out.join("coefficients.csv"), &all)?;
                write_coefficients_bin(&out.join("coefficients.bin"), &all)?;
            }
        }
    }
    write_table(&out.join("data.csv"), &rows)?;
    let worst = rows.iter().map(|r| r.defect).fold(0.0, f64::max);
    rep.check(Check::at_most(6, "parseval_defect_max", worst, 1e-3));
    rep.metric("round_trip_max", rows.iter().map(|r| r.round_trip).fold(0.0, f64::max));

    // exact analysis against the direct sum, and ⟨Af, c⟩ = ⟨f, Sc⟩
    let og = GridSpec::new(ORACLE.0, ORACLE.1).map_err(ridgelab_core::frame::FrameError::from)?;
    let ob = WindowBank::build(BankSpec { j_max: ORACLE.2, ..cfg.bank }, og)?;
    let f = source::wave_packets(og, cfg.seed, 4, 0.6 * (ORACLE.2 as f64).exp2());
    let fast = analyze(&f, &ob)?;
    rep.check(Check::at_most(6, "analyze_vs_direct", rel_diff(&fast, &analyze_direct(&f, &ob)?), 1e-10));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c = CoefficientSet::zeros(&ob);
    for v in c.values_mut() {
        *v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let lhs = fast.inner(&c)?;
    let rhs = f.inner(&synthesize(&c, &ob)?);
    let duality = (lhs - rhs).norm() / (f.l2_norm() * c.norm_sqr().sqrt());
    rep.check(Check::at_most(6, "duality", duality, 1e-10));

    // tails of e^{-π|x|²}: no scale may exceed the coarsest by more than 10×
    let top = TAIL_SCALES.min(cfg.bank.j_max);
    let g = GridFunction::from_real(cfg.grid, |x| (-PI * (x[0] * x[0] + x[1] * x[1])).exp());
    let consts = tail_constants(&analyze(&g, &bank)?, &bank, top);
    let worst = consts.iter().cloned().fold(0.0, f64::max);
    let least = consts.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.check(Check::at_most(11, "tail_constant_growth", worst / consts[0], 10.0));
    rep.metric("tail_constants", &consts);
    rep.metric("tail_constant_spread", worst / least);
    let tail_rows: Vec<_> = consts.iter().enumerate().map(|(j, &c)| TailRow { j: j as u32, constant: c }).collect();
    write_table(&out.join("tail_constants.csv"), &tail_rows)?;
    Ok(rep)
}
