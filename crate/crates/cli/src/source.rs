//! Sampling the configured function families on a grid.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use ridgelab_core::advection::{AbsorptionField, MutilatedFunction};
use ridgelab_core::geometry::{Direction, Point};
use ridgelab_core::grid::{FftPlan, GridFunction, GridSpec, Spectrum};
use ridgelab_core::quad::fixed_panels;
use ridgelab_core::Complex64;

use crate::config::{AbsorptionSpec, ExperimentConfig, SourceSpec};

fn cis(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

/// `∫_{-h}^{h} e^{-a u²} e^{-2πiηu} du`, the transform of one factor of the
/// box×Gaussian.
fn box_gauss_factor(eta: f64, h: f64, a: f64) -> f64 {
    // panels keep ~one oscillation per panel, so GK15 is exact to rounding
    let panels = (2.0 * eta.abs() * h).ceil() as usize + 2;
    2.0 * fixed_panels(|u| (-a * u * u).exp() * (2.0 * PI * eta * u).cos(), 0.0, h, panels)
        .expect("finite integrand on a bounded interval")
}

/// Box×Gaussian from its spectrum, optionally divided by the transport
/// symbol `κ + 2πi s·ξ`.  Sampling the indicator instead would alias the
/// jump into a staircase along the rotated edges.
pub fn box_gaussian(grid: GridSpec, angle: f64, h: f64, a: f64, transport: Option<(f64, Direction)>) -> GridFunction {
    let (s, c) = angle.sin_cos();
    let values: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.xi(i);
            let e1 = c * xi[0] + s * xi[1];
            let e2 = -s * xi[0] + c * xi[1];
            let v = Complex64::new(box_gauss_factor(e1, h, a) * box_gauss_factor(e2, h, a), 0.0);
            match transport {
                Some((kappa, dir)) => v / Complex64::new(kappa, 2.0 * PI * dir.dot(&xi)),
                None => v,
            }
        })
        .collect();
    let f = Spectrum { spec: grid, values }.inverse(&FftPlan::new(grid.n));
    GridFunction { spec: grid, values: f.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect() }
}

/// `count` Gaussian packets with centres in the middle 60% of the box and
/// frequencies below `max_freq`.
pub fn wave_packets(grid: GridSpec, seed: u64, count: usize, max_freq: f64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps: Vec<_> = (0..count)
        .map(|_| {
            let c = [rng.random_range(-0.3..0.3) * grid.l, rng.random_range(-0.3..0.3) * grid.l];
            let r = rng.random_range(0.0..max_freq);
            let th = rng.random_range(0.0..2.0 * PI);
            let w = rng.random_range(10.0..20.0) / (grid.l * grid.l);
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (c, [r * th.cos(), r * th.sin()], w, amp)
        })
        .collect();
    GridFunction::from_complex(grid, |x| {
        ps.iter()
            .map(|(c, k, w, amp)| {
                let d = [x[0] - c[0], x[1] - c[1]];
                amp * (-w * (d[0] * d[0] + d[1] * d[1])).exp() * cis(2.0 * PI * (k[0] * d[0] + k[1] * d[1]))
            })
            .sum()
    })
}

pub fn gaussian(a: f64, center: Point) -> impl Fn(Point) -> f64 + Send + Sync + Copy {
    move |x: Point| (-a * ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2))).exp()
}

pub fn mutilated(spec: &SourceSpec) -> Option<MutilatedFunction> {
    match spec {
        SourceSpec::Mutilated { a, base, hyperplanes } => {
            let (a, base) = (*a, *base);
            let g = gaussian(a, [0.0, 0.0]);
            Some(MutilatedFunction {
                f0: Arc::new(move |x| base * g(x)),
                parts: hyperplanes.iter().map(|h| (Arc::new(g) as ridgelab_core::advection::Field, *h)).collect(),
            })
        }
        _ => None,
    }
}

pub fn absorption(spec: &AbsorptionSpec) -> AbsorptionField {
    match *spec {
        AbsorptionSpec::Constant { value } => AbsorptionField::constant(value),
        AbsorptionSpec::SinSquared { base, amplitude, gamma } => AbsorptionField {
            kappa: Arc::new(move |x: Point| base + amplitude * (x[0] * x[1]).sin().powi(2)),
            gamma,
        },
    }
}

/// Samples of the configured source; wave packets give one field per seed.
pub fn sample(cfg: &ExperimentConfig) -> Vec<GridFunction> {
    let grid = cfg.grid;
    match &cfg.source {
        SourceSpec::WavePackets { fields, packets, max_freq } => {
            let top = (cfg.bank.j_max as f64).exp2() * max_freq;
            (0..*fields as u64).map(|i| wave_packets(grid, cfg.seed.wrapping_add(i), *packets, top)).collect()
        }
        SourceSpec::Gaussian { a, center } => vec![GridFunction::from_real(grid, gaussian(*a, *center))],
        SourceSpec::BoxGaussian { angle, half_width, gauss, transported } => {
            let transport = match (transported, cfg.absorption) {
                (true, AbsorptionSpec::Constant { value }) => Some((value, cfg.transport())),
                _ => None,
            };
            vec![box_gaussian(grid, *angle, *half_width, *gauss, transport)]
        }
        SourceSpec::Mutilated { .. } => {
            let m = mutilated(&cfg.source).expect("mutilated spec");
            vec![GridFunction::from_real(grid, |x| m.eval(x))]
        }
    }
}

/// Normal of the jump lines, with their offsets `x·n = v`.  The box edges
/// parallel to its first axis carry the jumps that transport along that
/// axis preserves.
pub fn singularity(cfg: &ExperimentConfig) -> (Direction, Vec<f64>) {
    match &cfg.source {
        SourceSpec::BoxGaussian { angle, half_width, .. } => {
            (Direction::from_angle(angle + PI / 2.0), vec![-half_width, *half_width])
        }
        SourceSpec::Mutilated { hyperplanes, .. } if !hyperplanes.is_empty() => {
            let n = hyperplanes[0].n;
            let offsets = hyperplanes.iter().filter(|h| h.n.abs_sin_to(&n) < 1e-12).map(|h| h.v * h.n.dot(&n.components())).collect();
            (n, offsets)
        }
        _ => (Direction::from_angle(cfg.transport_angle + PI / 2.0), vec![0.0]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_factor_matches_closed_form_without_gaussian() {
        // ∫_{-h}^{h} e^{-2πiηu} du = sin(2πηh)/(πη)
        for eta in [0.0, 0.3, 2.7, 41.5] {
            let exact = if eta == 0.0 { 1.2 } else { (2.0 * PI * eta * 0.6).sin() / (PI * eta) };
            assert!((box_gauss_factor(eta, 0.6, 0.0) - exact).abs() < 1e-13, "{eta}");
        }
    }

    #[test]
    fn spectral_box_matches_samples_away_from_edges() {
        let grid = GridSpec::new(2.0, 256).unwrap();
        let f = box_gaussian(grid, 0.3, 0.6, 4.0, None);
        let (s, c) = 0.3f64.sin_cos();
        let mut worst: f64 = 0.0;
        for i in 0..grid.len() {
            let x = grid.point(i);
            let y = [c * x[0] + s * x[1], -s * x[0] + c * x[1]];
            let edge = (y[0].abs() - 0.6).abs().min((y[1].abs() - 0.6).abs());
            if edge > 0.15 {
                let inside = y[0].abs() < 0.6 && y[1].abs() < 0.6;
                let exact = if inside { (-4.0 * (y[0] * y[0] + y[1] * y[1])).exp() } else { 0.0 };
                worst = worst.max((f.values[i].re - exact).abs());
            }
        }
        assert!(worst < 2e-2, "{worst}");
    }
}
