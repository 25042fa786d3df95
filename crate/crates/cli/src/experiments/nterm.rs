//! Best N-term approximation rates of the configured source, plus the
//! sequence-space identities the rate diagnostics rely on.

use std::path::Path;

use ridgelab_core::frame::WeightRule;
use ridgelab_core::seqspace::{
    fit_decay_exponent, local_slopes, log_sizes, lorentz_norm, nterm_error_curve, rearrange, slope_at, weak_lp_norm,
    NtermNorm,
};
use ridgelab_core::xform::analyze;
use serde::Serialize;

use super::{build_bank, RunError};
use crate::config::ExperimentConfig;
use crate::io::{write_coefficients_bin, write_coefficients_csv, write_curve_csv, write_grid_bin, write_json, write_table};
use crate::report::{Check, Report};
use crate::source;

const EXPONENTS: [f64; 5] = [0.5, 2.0 / 3.0, 1.0, 1.5, 2.0];

#[derive(Serialize)]
struct SlopeRow {
    n: usize,
    slope: f64,
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let mut rep = Report::new("nterm");
    let bank = build_bank(cfg)?;
    write_json(&out.join("bank.json"), &bank.describe())?;
    let f = source::sample(cfg).swap_remove(0);
    write_grid_bin(&out.join("source.bin"), &f)?;
    let c = analyze(&f, &bank)?;
    let rule = WeightRule { s: cfg.transport() };

    let nt = &cfg.nterm;
    let mut ns = vec![0usize];
    ns.extend(log_sizes(nt.log2_min, nt.log2_max, nt.per_octave));
    let curve = nterm_error_curve(&c, &bank, &f, NtermNorm::L2, Some(&rule), &ns)?;
    write_curve_csv(&out.join("data.csv"), &curve)?;
    let slopes: Vec<_> = local_slopes(&curve).into_iter().map(|(n, slope)| SlopeRow { n, slope }).collect();
    write_table(&out.join("slopes.csv"), &slopes)?;

    let at = |n: usize| slope_at(&curve, n).unwrap_or(f64::NAN);
    rep.check(Check::at_most(9, "slope_at_2^10", at(1 << 10), -1.0));
    rep.check(Check::below(9, "slope_2^12_minus_slope_2^8", at(1 << 12) - at(1 << 8), 0.0));
    rep.metric("slope_2^8", at(1 << 8));
    rep.metric("slope_2^10", at(1 << 10));
    rep.metric("slope_2^12", at(1 << 12));
    rep.metric("relative_error_at_max", curve.last().map(|p| p.error_l2 / f.l2_norm()));

    let mags: Vec<f64> = c.iter().map(|(_, v)| v.norm()).collect();
    let r = rearrange(&mags);
    let (n1, n2) = nt.fit_window;
    if n2 <= r.len() {
        rep.metric("decay_fit", fit_decay_exponent(&r, (n1, n2))?.with_benchmark(cfg.smoothness, 2.0));
    }

    // ℓ^{p,p} is ℓ^p
    let mut worst: f64 = 0.0;
    for p in EXPONENTS {
        let plain = mags.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p);
        worst = worst.max((lorentz_norm(&r, p, p)? - plain).abs() / plain);
    }
    rep.check(Check::at_most(12, "lorentz_diagonal_vs_lp", worst, 1e-12));
    // ‖(n^{-1/p})‖_{p,∞} = 1
    let mut worst: f64 = 0.0;
    for p in EXPONENTS {
        let seq: Vec<f64> = (1..=10_000).map(|n| (n as f64).powf(-1.0 / p)).collect();
        worst = worst.max((weak_lp_norm(&rearrange(&seq), p)? - 1.0).abs());
    }
    rep.check(Check::at_most(12, "weak_norm_of_power_law", worst, 1e-12));
    let rises = curve.windows(2).filter(|w| w[1].error_l2 > w[0].error_l2 || w[1].error_hs > w[0].error_hs).count();
    rep.check(Check::none(12, "curve_increases", rises));

    let mut sorted = c.sorted();
    sorted.truncate(1000);
    write_coefficients_csv(&out.join("top_coefficients.csv"), &sorted)?;
    if cfg.dump_coefficients {
        let all: Vec<_> = c.iter().collect();
        write_coefficients_csv(&out.join("coefficients.csv"), &all)?;
        write_coefficients_bin(&out.join("coefficients.bin"), &all)?;
    }
    rep.metric("coefficients", c.len());
    rep.metric("norm", f.l2_norm());
    Ok(rep)
}
