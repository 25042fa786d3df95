//! Verification of the two-factor integral: three evaluation paths, the
//! coefficient tables, partial fractions, the upper bounds and the special
//! values behind the closed form.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use ridgelab_core::imn::*;
use serde::Serialize;

use super::RunError;
use crate::config::ExperimentConfig;
use crate::io::write_table;
use crate::report::{Check, Report};

const TABLE_LONG: u32 = 4;
const TABLE_PATTERN: u32 = 5;
const PFD_DRAWS: usize = 50;
const PFD_MAX: u32 = 5;
const GENFUNC_ORDER: usize = 8;
const BOUND_DRAWS: usize = 1000;
const QUAD_TOL: f64 = 1e-10;

#[derive(Serialize)]
struct DrawRow {
    m: u32,
    n: u32,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    closed_form: f64,
    series: f64,
    quadrature: f64,
    rel_series: f64,
    rel_quadrature: f64,
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Wide draws: `a = 0` now and then, the rest log-uniform over decades.
fn draw(rng: &mut ChaCha8Rng, m: u32, n: u32) -> Result<ImnParams, ImnError> {
    let a = if rng.random_bool(0.15) { 0.0 } else { log_uniform(rng, 1e-2, 1e3) };
    let b = rng.random_range(-1e2..1e2);
    let c = log_uniform(rng, 1e-2, 1e2);
    let d = log_uniform(rng, 1e-2, 1e2);
    ImnParams::new(m, n, a, b, c, d)
}

fn rel(x: f64, y: f64) -> f64 {
    ((x - y) / y).abs()
}

fn rat(n: i64, d: i64) -> BigRational {
    ExactScalar::ratio(n, d).into_rational()
}

fn triple_path(cfg: &ExperimentConfig, rep: &mut Report, out: &Path) -> Result<(), RunError> {
    let im = &cfg.imn;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let start = std::time::Instant::now();
    let rows = (0..im.samples)
        .map(|i| {
            let m = 1 + i as u32 % im.m_max;
            let n = 1 + (i as u32 / im.m_max) % im.n_max;
            let p = draw(&mut rng, m, n)?;
            let closed_form = imn_closed_form(&p);
            let series = imn_generating_series(&p)?;
            let quadrature = imn_quadrature(&p, QUAD_TOL)?;
            Ok(DrawRow {
                m,
                n,
                a: p.a,
                b: p.b,
                c: p.c,
                d: p.d,
                closed_form,
                series,
                quadrature,
                rel_series: rel(series, closed_form),
                rel_quadrature: rel(quadrature, closed_form),
            })
        })
        .collect::<Result<Vec<_>, ImnError>>()?;
    let seconds = start.elapsed().as_secs_f64();
    write_table(&out.join("data.csv"), &rows)?;
    let worst = |f: fn(&DrawRow) -> f64| rows.iter().map(f).fold(0.0, |a: f64, b| if b.is_nan() { b } else { a.max(b) });
    rep.check(Check::at_most(1, "quadrature_rel_error", worst(|r| r.rel_quadrature), im.tol));
    rep.check(Check::at_most(1, "series_rel_error", worst(|r| r.rel_series), 1e-10));
    rep.check(Check::at_most(1, "seconds", seconds, 60.0));
    Ok(())
}

fn tables(cfg: &ExperimentConfig, rep: &mut Report) {
    let mut mismatches = 0;
    for m in 1..=TABLE_LONG.min(cfg.imn.m_max) {
        for n in 1..=TABLE_LONG.min(cfg.imn.n_max) {
            let top = 2 * (m + n) - 3;
            for i in 0..=top + 1 {
                for j in 0..=top + 1 {
                    mismatches += (cmn_coefficient(m, n, i, j) != cmn_coefficient_long(m, n, i, j)) as usize;
                }
            }
        }
    }
    rep.check(Check::none(2, "double_vs_long_sum_mismatches", mismatches));
    let mut violations = 0;
    for m in 1..=TABLE_PATTERN.min(cfg.imn.m_max) {
        for n in 1..=TABLE_PATTERN.min(cfg.imn.n_max) {
            let t = cmn_table(m, n);
            for i in 0..t.size() {
                for j in 0..t.size() {
                    let allowed = satisfies_nonvanishing_conditions(m, n, i as u32, j as u32);
                    violations += (t.get(i, j).is_zero() == allowed) as usize;
                }
            }
        }
    }
    rep.check(Check::none(2, "vanishing_pattern_violations", violations));
    let one = ExactScalar::from_int(1);
    let unit = (cmn_coefficient(1, 1, 1, 0) != one) as usize + (cmn_coefficient(1, 1, 0, 1) != one) as usize;
    rep.check(Check::none(2, "c11_unit_entries_wrong", unit));
    let scan = positivity_scan(TABLE_PATTERN.min(cfg.imn.m_max), TABLE_PATTERN.min(cfg.imn.n_max));
    rep.metric("negative_table_entries", scan.negatives.len());
}

fn partial_fractions(cfg: &ExperimentConfig, rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut worst: f64 = 0.0;
    let mut worst_f64: f64 = 0.0;
    for _ in 0..PFD_DRAWS {
        let m = rng.random_range(1..=PFD_MAX);
        let n = rng.random_range(1..=PFD_MAX);
        let a = rng.random_range(0.2..3.0);
        let b = rng.random_range(-2.0..2.0);
        let c = rng.random_range(0.2..3.0);
        let d = rng.random_range(0.2..3.0);
        let x = rng.random_range(-4.0..4.0);
        let p = ImnParams { m, n, a, b, c, d };
        let r = pfd_residual(m as usize, n as usize, &p, x);
        worst = if r.is_nan() { r } else { worst.max(r) };
        worst_f64 = worst_f64.max(pfd_residual_f64(m as usize, n as usize, &p, x));
    }
    rep.check(Check::at_most(3, "pfd_residual", worst, 1e-9));
    rep.metric("pfd_residual_floating_point", worst_f64);

    // exact identities on rational draws
    let mut broken = 0;
    let mut genfunc = 0;
    for _ in 0..5 {
        let mut q = |lo: i64, hi: i64| rat(rng.random_range(lo..=hi), rng.random_range(1..=9));
        let p = PfdParams { a: q(1, 20), b: q(-20, 20), c: q(1, 20), d: q(1, 20) };
        let t = pfd_tables(PFD_MAX as usize, PFD_MAX as usize, &p);
        let a2b2 = &p.a * &p.a * &p.b * &p.b;
        for l in 1..=PFD_MAX as usize {
            for k in 1..=PFD_MAX as usize {
                broken += (t.r(l, k) + t.t(l, k) != rat(2, 1) * &a2b2 * t.u(l, k)) as usize;
                broken += (t.s(l, k) != -t.u(l, k).clone()) as usize;
            }
        }
        genfunc += pfd_genfunc_check(GENFUNC_ORDER, &p);
    }
    rep.check(Check::none(3, "rational_identity_failures", broken));
    rep.check(Check::none(3, "genfunc_mismatches", genfunc));
}

fn bounds(cfg: &ExperimentConfig, rep: &mut Report) -> Result<(), RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let mut exceed = 0;
    let mut bad_ratio = 0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..BOUND_DRAWS {
        let m = 1 + i as u32 % cfg.imn.m_max;
        let n = 1 + (i as u32 / cfg.imn.m_max) % cfg.imn.n_max;
        let p = draw(&mut rng, m, n)?;
        let best = upper_bound(&p, BoundVariant::Best, false);
        exceed += (!(best <= upper_bound(&p, BoundVariant::Simple, false))) as usize;
        let r = imn_closed_form(&p) / best;
        if r.is_finite() && r > 0.0 {
            lo = lo.min(r);
            hi = hi.max(r);
        } else {
            bad_ratio += 1;
        }
    }
    rep.check(Check::none(4, "best_exceeds_simple", exceed));
    rep.check(Check::none(4, "nonfinite_ratios", bad_ratio));
    rep.metric("ratio_to_best_bound", [lo, hi]);
    Ok(())
}

fn special_values(rep: &mut Report) -> Result<(), RunError> {
    let sp = PI.sqrt();
    let mut worst: f64 = 0.0;
    let mut exact_fail = 0;
    let mut cmp = |x: f64, y: f64| worst = worst.max(((x - y) / y).abs());
    for (m, sign, q, v) in [
        (0, HalfSign::Plus, rat(1, 1), sp),
        (1, HalfSign::Plus, rat(1, 2), sp / 2.0),
        (1, HalfSign::Minus, rat(-2, 1), -2.0 * sp),
    ] {
        let g = gamma_half(m, sign);
        exact_fail += (*g.as_rational() != q) as usize;
        cmp(g.to_f64() * sp, v);
    }
    for (cn, cd) in [(1, 1), (3, 2), (-5, 7)] {
        let c = rat(cn, cd);
        let cf = cn as f64 / cd as f64;
        let two_c = rat(2, 1) * &c;
        exact_fail += (*bell_sqrt(1, 1, &c)?.as_rational() != -two_c.recip()) as usize;
        cmp(bell_sqrt_f64(1, 1, cf)?, -1.0 / (2.0 * cf));
        let four_c3 = rat(4, 1) * &c * &c * &c;
        exact_fail += (*bell_sqrt(2, 1, &c)?.as_rational() != -four_c3.recip()) as usize;
        cmp(bell_sqrt_f64(2, 1, cf)?, -1.0 / (4.0 * cf.powi(3)));
        for n in 1..=6u32 {
            let expect = rational_pow(-two_c.clone(), n).recip();
            exact_fail += (*bell_sqrt(n, n, &c)?.as_rational() != expect) as usize;
            cmp(bell_sqrt_f64(n, n, cf)?, (-2.0 * cf).powi(-(n as i32)));
        }
    }
    for (m, a, c, v) in [(1, 1.0, 1.0, PI), (2, 1.0, 1.0, PI / 2.0), (1, 2.0, 3.0, PI / 6.0)] {
        cmp(single_factor_integral(m, a, c)?, v);
    }
    rep.check(Check::at_most(5, "special_values_rel_error", worst, 1e-12));
    rep.check(Check::none(5, "special_values_exact_mismatches", exact_fail));
    Ok(())
}

fn rational_pow(x: BigRational, n: u32) -> BigRational {
    (0..n).fold(rat(1, 1), |acc, _| acc * &x)
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let mut rep = Report::new("imn-verify");
    triple_path(cfg, &mut rep, out)?;
    tables(cfg, &mut rep);
    partial_fractions(cfg, &mut rep);
    bounds(cfg, &mut rep)?;
    special_values(&mut rep)?;
    Ok(rep)
}
