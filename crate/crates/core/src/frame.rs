//! Frequency window bank, frame weights and ridgelet decay diagnostics.
//!
//! Scale `j >= 1` has `2^{j+1}` windows `ψ̂_{j,ℓ}(ξ) = b(log₂|ξ| - j) ·
//! b(Δθ / 2^{1-j})`, supported on the polar rectangle
//! `2^{j-1} < |ξ| < 2^{j+1}`, `|Δθ| < 2^{1-j}`.  Scale 0 is one isotropic
//! low-pass window equal to 1 on the unit disc.  On the grid the windows are
//! divided by `√(Σ ψ̂²)` so their squares sum to one exactly.
//!
//! Coefficients of window `(j, ℓ)` live on the lattice
//! `x_k = U_{j,ℓ}(σ ∘ k)`.  The rotated, dilated support `U^T P_{j,ℓ}` lies
//! in `[1/4, 2] × [-4, 4]`, which fits one period cell of the dual lattice
//! for `σ = (1/2, 1/8)`; the low-pass support `[-2, 2]²` needs
//! `σ₀ = (1/4, 1/4)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{direction, direction_angle, num_directions, AnisotropicMap, Direction, FrameIndex};
use crate::grid::{japanese, FftPlan, GridError, GridSpec, Spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("grid corner frequency {corner} exceeds the bank's coverage 2^(J+1) = {coverage}; raise J or lower N/L")]
    Resolution { corner: f64, coverage: f64 },
    #[error("invalid bank specification: {0}")]
    BadSpec(String),
    #[error("no window ({j}, {l}) in this bank")]
    NoWindow { j: u32, l: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Transition profile `b` on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `(1 - t²)³`, twice continuously differentiable.
    #[default]
    C2Poly,
    /// `exp(1 - 1/(1 - t²))`, infinitely smooth.
    Smooth,
}

impl Profile {
    pub fn eval(self, t: f64) -> f64 {
        let s = 1.0 - t * t;
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Profile::C2Poly => s * s * s,
            Profile::Smooth => (1.0 - 1.0 / s).exp(),
        }
    }
}

pub const SIGMA_DEFAULT: [f64; 2] = [0.5, 0.125];
pub const SIGMA_LOWPASS: [f64; 2] = [0.25, 0.25];

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BankSpec {
    pub j_max: u32,
    #[serde(default = "default_sigma")]
    pub sigma: [f64; 2],
    #[serde(default)]
    pub profile: Profile,
}

fn default_sigma() -> [f64; 2] {
    SIGMA_DEFAULT
}

impl BankSpec {
    pub fn new(j_max: u32) -> Self {
        BankSpec { j_max, sigma: SIGMA_DEFAULT, profile: Profile::C2Poly }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Unnormalized window value.
pub fn raw_window(profile: Profile, j: u32, l: u32, xi: [f64; 2]) -> f64 {
    let r = xi[0].hypot(xi[1]);
    if j == 0 {
        return if r <= 1.0 { 1.0 } else if r < 2.0 { profile.eval(r.log2()) } else { 0.0 };
    }
    if r == 0.0 {
        return 0.0;
    }
    let radial = profile.eval(r.log2() - j as f64);
    if radial == 0.0 {
        return 0.0;
    }
    let d = wrap_angle(xi[1].atan2(xi[0]) - direction_angle(j, l));
    radial * profile.eval(d * (j as f64 - 1.0).exp2())
}

/// One window sampled on the grid, with its lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub j: u32,
    pub l: u32,
    pub map: AnisotropicMap,
    pub sigma: [f64; 2],
    /// Grid storage positions of the support (FFT order).
    pub support: Vec<u32>,
    /// Normalized window values on the support.
    pub values: Vec<f64>,
}

impl Window {
    /// Lattice point `U (σ ∘ k)`.
    pub fn lattice_point(&self, k: [i64; 2]) -> [f64; 2] {
        self.map.apply_u([self.sigma[0] * k[0] as f64, self.sigma[1] * k[1] as f64])
    }

    /// Coefficient scale `√(σ₁σ₂) 2^{-j/2}`.
    pub fn alpha(&self) -> f64 {
        (self.sigma[0] * self.sigma[1]).sqrt() * (-(self.j as f64) / 2.0).exp2()
    }

    /// `(σ ∘ U^T ξ)`: the phase of `ξ·x_k` is `2π (η₁ k₁ + η₂ k₂)`.
    pub fn eta(&self, xi: [f64; 2]) -> [f64; 2] {
        let r = self.map.rotation.apply(xi);
        [r[0] * (-(self.j as f64)).exp2() * self.sigma[0], r[1] * self.sigma[1]]
    }

    /// Inclusive `k` ranges of the lattice points strictly inside the box,
    /// per `k₁`: `(k₁, k₂_lo, k₂_hi)`.
    pub fn k_rows(&self, l_box: f64) -> Vec<(i64, i64, i64)> {
        let reach = l_box * std::f64::consts::SQRT_2;
        let s1 = (-(self.j as f64)).exp2() * self.sigma[0];
        let k1max = (reach / s1).ceil() as i64;
        let k2max = (reach / self.sigma[1]).ceil() as i64;
        let mut rows = Vec::new();
        for k1 in -k1max..=k1max {
            let mut lo = i64::MAX;
            let mut hi = i64::MIN;
            for k2 in -k2max..=k2max {
                let p = self.lattice_point([k1, k2]);
                if p[0].abs() < l_box && p[1].abs() < l_box {
                    lo = lo.min(k2);
                    hi = hi.max(k2);
                }
            }
            if lo <= hi {
                rows.push((k1, lo, hi));
            }
        }
        rows
    }
}

/// Serializable description of a bank.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BankDescription {
    pub profile: Profile,
    pub j_max: u32,
    pub sigma: [f64; 2],
    pub sigma_lowpass: [f64; 2],
    pub grid: GridSpec,
    pub windows: usize,
    pub nonempty_windows: usize,
    pub support_samples: usize,
    pub partition_defect: f64,
}

#[derive(Debug, Clone)]
pub struct WindowBank {
    pub spec: BankSpec,
    pub grid: GridSpec,
    windows: Vec<Window>,
    /// Offset of scale `j`'s first window in `windows`.
    offsets: Vec<usize>,
}

pub fn build_window_bank(j_max: u32, grid: GridSpec, sigma: [f64; 2]) -> Result<WindowBank, FrameError> {
    WindowBank::build(BankSpec { j_max, sigma, profile: Profile::C2Poly }, grid)
}

impl WindowBank {
    pub fn build(spec: BankSpec, grid: GridSpec) -> Result<WindowBank, FrameError> {
        grid.validate()?;
        if spec.j_max < 1 {
            return Err(FrameError::BadSpec("J must be at least 1".into()));
        }
        if !(spec.sigma.iter().all(|s| *s > 0.0 && *s <= 1.0)) {
            return Err(FrameError::BadSpec(format!("sigma {:?} must lie in (0, 1]", spec.sigma)));
        }
        let coverage = (spec.j_max as f64 + 1.0).exp2();
        if grid.corner_frequency() >= coverage {
            return Err(FrameError::Resolution { corner: grid.corner_frequency(), coverage });
        }
        let npts = grid.len();
        let mut windows = Vec::new();
        let mut offsets = Vec::new();
        let mut norm = vec![0.0f64; npts];
        for j in 0..=spec.j_max {
            offsets.push(windows.len());
            let count = if j == 0 { 1 } else { num_directions(j) as u32 };
            for l in 0..count {
                let (map, sigma) = if j == 0 {
                    (AnisotropicMap::new(0, &Direction::e1()), SIGMA_LOWPASS)
                } else {
                    (AnisotropicMap::for_index(j, l), spec.sigma)
                };
                let mut support = Vec::new();
                let mut values = Vec::new();
                for p in 0..npts {
                    let v = raw_window(spec.profile, j, l, grid.xi(p));
                    if v > 0.0 {
                        support.push(p as u32);
                        values.push(v);
                        norm[p] += v * v;
                    }
                }
                windows.push(Window { j, l, map, sigma, support, values });
            }
        }
        offsets.push(windows.len());
        for w in windows.iter_mut() {
            for (v, &p) in w.values.iter_mut().zip(&w.support) {
                *v /= norm[p as usize].sqrt();
            }
        }
        Ok(WindowBank { spec, grid, windows, offsets })
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn window(&self, j: u32, l: u32) -> Option<&Window> {
        let j = j as usize;
        if j + 1 >= self.offsets.len() {
            return None;
        }
        let idx = self.offsets[j] + l as usize;
        (idx < self.offsets[j + 1]).then(|| &self.windows[idx])
    }

    pub fn directions_at(&self, j: u32) -> usize {
        self.offsets[j as usize + 1] - self.offsets[j as usize]
    }

    /// `max_ξ |Σ ψ̂² - 1|` over the grid.
    pub fn partition_defect(&self) -> f64 {
        let mut sum = vec![0.0f64; self.grid.len()];
        for w in &self.windows {
            for (&p, &v) in w.support.iter().zip(&w.values) {
                sum[p as usize] += v * v;
            }
        }
        sum.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn describe(&self) -> BankDescription {
        BankDescription {
            profile: self.spec.profile,
            j_max: self.spec.j_max,
            sigma: self.spec.sigma,
            sigma_lowpass: SIGMA_LOWPASS,
            grid: self.grid,
            windows: self.windows.len(),
            nonempty_windows: self.windows.iter().filter(|w| !w.support.is_empty()).count(),
            support_samples: self.windows.iter().map(|w| w.support.len()).sum(),
            partition_defect: self.partition_defect(),
        }
    }
}

/// Normalized window value at an arbitrary frequency (same normalization as
/// on the grid: divide by the root of the sum of all squared raw windows).
pub fn window_value(bank: &WindowBank, j: u32, l: u32, xi: [f64; 2]) -> Result<f64, FrameError> {
    if bank.window(j, l).is_none() {
        return Err(FrameError::NoWindow { j, l });
    }
    let own = raw_window(bank.spec.profile, j, l, xi);
    if own == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for jj in j.saturating_sub(1)..=(j + 1).min(bank.spec.j_max) {
        let count = if jj == 0 { 1 } else { num_directions(jj) as u32 };
        for ll in 0..count {
            total += raw_window(bank.spec.profile, jj, ll, xi).powi(2);
        }
    }
    Ok(own / total.sqrt())
}

/// Diagonal frame weight `w_λ = 1 + 2^j |s·s_{j,ℓ}|`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightRule {
    pub s: Direction,
}

impl WeightRule {
    /// The isotropic low-pass element has no direction; it gets the largest
    /// weight its scale allows, `1 + 2^0 = 2`.
    pub fn weight(&self, j: u32, l: u32) -> f64 {
        if j == 0 {
            return 2.0;
        }
        let d = direction(j, l);
        1.0 + (j as f64).exp2() * self.s.dot(&d.components()).abs()
    }
}

pub fn weight(rule: &WeightRule, lambda: &FrameIndex) -> f64 {
    rule.weight(lambda.j, lambda.l)
}

/// `sup_x |φ_λ(x)| ⟨U⁻¹(x - x_k)⟩^{2m} 2^{-j/2}` with `φ_λ = 2^{-j/2} F⁻¹[ψ̂ e^{-2πiξ·x_k}]`,
/// or for `modified` the element with extra multiplier `ξ₁/|ξ|²` and the
/// factor `2^{j/2}` instead.  The element is sampled on the grid translated
/// to `x_k` (minimal periodic images), so the result does not depend on `k`.
pub fn ridgelet_space_decay_check(bank: &WindowBank, j: u32, l: u32, m: u32, modified: bool) -> Result<f64, FrameError> {
    let w = bank.window(j, l).ok_or(FrameError::NoWindow { j, l })?;
    let grid = bank.grid;
    let mut spec = Spectrum::zeros(grid);
    let amp = (-(j as f64) / 2.0).exp2();
    for (&p, &v) in w.support.iter().zip(&w.values) {
        let xi = grid.xi(p as usize);
        let mult = if modified {
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            if r2 == 0.0 {
                0.0
            } else {
                xi[0] / r2
            }
        } else {
            1.0
        };
        spec.values[p as usize] = Complex64::new(amp * v * mult, 0.0);
    }
    let phi = spec.inverse(&FftPlan::new(grid.n));
    let scale = if modified { (j as f64 / 2.0).exp2() } else { amp };
    let half = grid.n / 2;
    let period = 2.0 * grid.l;
    const IMAGES: [[f64; 2]; 9] =
        [[-1., -1.], [-1., 0.], [-1., 1.], [0., -1.], [0., 0.], [0., 1.], [1., -1.], [1., 0.], [1., 1.]];
    let mut sup: f64 = 0.0;
    for (idx, val) in phi.values.iter().enumerate() {
        // the torus atom is a periodization, so measure against the nearest image
        let (i, jj) = (idx / grid.n, idx % grid.n);
        let y = [(i as f64 - half as f64) * grid.h(), (jj as f64 - half as f64) * grid.h()];
        let weight = IMAGES
            .iter()
            .map(|p| japanese(w.map.apply_u_inv([y[0] + period * p[0], y[1] + period * p[1]])))
            .fold(f64::INFINITY, f64::min)
            .powi(2 * m as i32);
        sup = sup.max(val.norm() * weight * scale);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank(n: usize, l: f64, j: u32) -> WindowBank {
        build_window_bank(j, GridSpec::new(l, n).unwrap(), SIGMA_DEFAULT).unwrap()
    }

    #[test]
    fn partition_is_exact() {
        let b = bank(64, 4.0, 3);
        assert!(b.partition_defect() < 1e-12);
        assert_eq!(b.windows().len(), 1 + 4 + 8 + 16);
    }

    #[test]
    fn resolution_error() {
        let g = GridSpec::new(2.0, 128).unwrap();
        assert!(build_window_bank(3, GridSpec::new(2.0, 64).unwrap(), SIGMA_DEFAULT).is_ok());
        assert!(matches!(build_window_bank(3, g, SIGMA_DEFAULT), Err(FrameError::Resolution { .. })));
    }

    #[test]
    fn support_examples() {
        let b = bank(64, 4.0, 3);
        assert_eq!(window_value(&b, 2, 0, [8.0, 0.0]).unwrap(), 0.0);
        assert_eq!(window_value(&b, 2, 3, [0.0, 0.0]).unwrap(), 0.0);
        let s = direction(2, 3).components();
        let c = window_value(&b, 2, 3, [4.0 * s[0], 4.0 * s[1]]).unwrap();
        assert!(c > 0.0 && c <= 1.0);
        let far = Direction::from_angle(direction_angle(2, 3) + 1.0).components();
        assert_eq!(window_value(&b, 2, 3, [4.0 * far[0], 4.0 * far[1]]).unwrap(), 0.0);
    }

    #[test]
    fn rotated_support_box() {
        let b = bank(64, 4.0, 3);
        for w in b.windows().iter().filter(|w| w.j >= 1) {
            for &p in &w.support {
                let xi = b.grid.xi(p as usize);
                let r = w.map.rotation.apply(xi);
                let e = [r[0] * (-(w.j as f64)).exp2(), r[1]];
                assert!(e[0] >= 0.25 && e[0] <= 2.0 && e[1].abs() <= 4.0, "{e:?}");
            }
        }
    }

    #[test]
    fn weights() {
        let s = direction(3, 5);
        let rule = WeightRule { s };
        assert!((rule.weight(3, 5) - 9.0).abs() < 1e-12);
        let perp = WeightRule { s: Direction::from_angle(direction_angle(3, 5) + PI / 2.0) };
        assert!((perp.weight(3, 5) - 1.0).abs() < 1e-12);
    }
}
