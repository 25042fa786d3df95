//! Advection-reaction solver checks: an exact solution, a manufactured
//! solution, the equation residual, the decay envelope under refinement,
//! and the weighted norm of solutions relative to their sources.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use ridgelab_core::advection::{
    apply_a, bilinear, decay_envelope_check, fourier_split_check, solve, AbsorptionField, Hyperplane, MutilatedFunction,
    Source, SolveOptions,
};
use ridgelab_core::frame::{BankSpec, FrameError, WeightRule, WindowBank};
use ridgelab_core::geometry::{Direction, Point};
use ridgelab_core::grid::{GridFunction, GridSpec};
use ridgelab_core::xform::{analyze, hs_norm_via_weights};
use serde::Serialize;

use super::RunError;
use crate::config::ExperimentConfig;
use crate::io::{write_grid_bin, write_table};
use crate::report::{Check, Report};
use crate::source;

/// Fixed grid of the weighted-norm suite.
const SUITE: (f64, usize, u32) = (4.0, 128, 5);

#[derive(Serialize)]
struct SuiteRow {
    index: usize,
    a: f64,
    cx: f64,
    cy: f64,
    angle: f64,
    absorption: &'static str,
    ratio: f64,
}

fn gauss(x: Point) -> f64 {
    (-PI * (x[0] * x[0] + x[1] * x[1])).exp()
}

fn max_error(u: &GridFunction, exact: impl Fn(Point) -> f64, radius: f64) -> f64 {
    (0..u.spec.len())
        .filter(|&i| {
            let x = u.spec.point(i);
            x[0].abs() < radius && x[1].abs() < radius
        })
        .map(|i| (u.values[i].re - exact(u.spec.point(i))).abs())
        .fold(0.0, f64::max)
}

/// κ ≡ 1, s = e₁, f = H(x₁) e^{-x₁} g(x₂) has u = g(x₂) H(x₁) x₁ e^{-x₁}.
fn closed_form_error(grid: GridSpec) -> Result<f64, RunError> {
    let g = |y: f64| (-3.0 * y * y).exp();
    let src = MutilatedFunction {
        f0: Arc::new(|_| 0.0),
        parts: vec![(Arc::new(move |x: Point| (-x[0]).exp() * g(x[1])), Hyperplane { n: Direction::e1(), v: 0.0 })],
    };
    let u = solve(Source::Mutilated(&src), &AbsorptionField::constant(1.0), &Direction::e1(), grid, SolveOptions::default())?;
    Ok(max_error(&u, |x| if x[0] > 0.0 { g(x[1]) * x[0] * (-x[0]).exp() } else { 0.0 }, f64::INFINITY))
}

fn suite(kappa: &AbsorptionField) -> Result<Vec<SuiteRow>, RunError> {
    let grid = GridSpec::new(SUITE.0, SUITE.1).map_err(FrameError::from)?;
    let bank = WindowBank::build(BankSpec::new(SUITE.2), grid)?;
    (0..10)
        .map(|i| {
            let a = [1.0, 2.0, 4.0, 8.0, 1.5][i % 5];
            let c = [0.3 * (i as f64).sin(), -0.2 * (i as f64).cos()];
            let angle = 0.37 * i as f64;
            let s = Direction::from_angle(angle);
            let (k, name) = if i % 2 == 0 { (AbsorptionField::constant(1.0), "constant") } else { (kappa.clone(), "configured") };
            let f = GridFunction::from_real(grid, source::gaussian(a, c));
            let u = solve(Source::Grid(&f), &k, &s, grid, SolveOptions::default())?;
            let ratio = hs_norm_via_weights(&analyze(&u, &bank)?, &WeightRule { s }) / f.l2_norm();
            Ok(SuiteRow { index: i, a, cx: c[0], cy: c[1], angle, absorption: name, ratio })
        })
        .collect()
}

/// Smallest ratio of the jump across `plane` to the variation along it, at
/// five points of the plane.
fn structure_ratio(u: &GridFunction, plane: &Hyperplane) -> f64 {
    let eps = 2.0 * u.spec.h();
    let n = plane.n;
    let s = Direction::from_angle(n.angle() - PI / 2.0);
    let at = |p: Point, d: Direction, t: f64| bilinear(u, [p[0] + t * d.x(), p[1] + t * d.y()]);
    let diff = |p: Point, d: Direction| (at(p, d, eps) - at(p, d, -eps)).abs();
    let base = [plane.v * n.x(), plane.v * n.y()];
    [-0.2, -0.1, 0.0, 0.1, 0.2]
        .iter()
        .map(|&t| {
            let p = [base[0] + t * s.x(), base[1] + t * s.y()];
            let along = [eps, -eps].iter().map(|&o| diff([p[0] + o * n.x(), p[1] + o * n.y()], s)).fold(0.0, f64::max);
            diff(p, n) / along
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<Report, RunError> {
    let mut rep = Report::new("advect");
    let grid = cfg.grid;
    let s = cfg.transport();
    let kappa = source::absorption(&cfg.absorption);

    rep.check(Check::at_most(7, "closed_form_max_error", closed_form_error(grid)?, 1e-4));

    let k = kappa.kappa.clone();
    let f = MutilatedFunction::smooth(Arc::new(move |x: Point| (-2.0 * PI * s.dot(&x) + k(x)) * gauss(x)));
    let u = solve(Source::Mutilated(&f), &kappa, &s, grid, SolveOptions::default())?;
    rep.check(Check::at_most(7, "manufactured_max_error", max_error(&u, gauss, 0.75 * grid.l), 1e-4));
    let fg = GridFunction::from_real(grid, |x| f.eval(x));
    let residual = apply_a(&u, &kappa, &s).sub(&fg).l2_norm() / fg.l2_norm();
    rep.check(Check::at_most(7, "relative_residual", residual, 5e-3));

    let consts = [grid.n / 2, grid.n]
        .iter()
        .map(|&n| {
            let g = GridSpec::new(grid.l, n).map_err(FrameError::from)?;
            let f = GridFunction::from_real(g, gauss);
            Ok(decay_envelope_check(&solve(Source::Grid(&f), &kappa, &s, g, SolveOptions::default())?, 2))
        })
        .collect::<Result<Vec<f64>, RunError>>()?;
    rep.check(Check::at_most(7, "decay_constant_change_under_doubling", (consts[1] / consts[0] - 1.0).abs(), 1e-2));
    rep.metric("decay_constants", consts);

    let rows = suite(&kappa)?;
    write_table(&out.join("data.csv"), &rows)?;
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    rep.check(Check::at_least(8, "weighted_norm_ratio_min", lo, 0.1));
    rep.check(Check::at_most(8, "weighted_norm_ratio_max", hi, 10.0));

    // the configured source: solution, split identity, jump structure
    let sol = match source::mutilated(&cfg.source) {
        Some(m) => {
            if let Some((g, plane)) = m.parts.first() {
                let g = g.clone();
                rep.metric("fourier_split", fourier_split_check(&move |x| g(x), &plane.n, plane.v, grid));
            }
            let u = solve(Source::Mutilated(&m), &kappa, &s, grid, SolveOptions::default())?;
            for (i, (_, plane)) in m.parts.iter().enumerate() {
                if plane.n.abs_sin_to(&Direction::from_angle(s.angle() + PI / 2.0)) < 1e-12 {
                    rep.metric(&format!("structure_ratio_{i}"), structure_ratio(&u, plane));
                }
            }
            u
        }
        None => {
            let f = source::sample(cfg).swap_remove(0);
            solve(Source::Grid(&f), &kappa, &s, grid, SolveOptions::default())?
        }
    };
    write_grid_bin(&out.join("solution.bin"), &sol)?;
    Ok(rep)
}
