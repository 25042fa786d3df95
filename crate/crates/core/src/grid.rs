//! Sample grids on the periodic box `[-L, L)²` and the discrete Fourier
//! convention.
//!
//! With `h = 2L/N`, `x_n = -L + n h` and `ξ_m = m / (2L)` for
//! `m ∈ [-N/2, N/2)`, the forward transform approximates
//! `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx`:
//!
//! ```text
//! f̂_m = h² Σ_n f_n e^{-2πi x_n·ξ_m} = h² (-1)^{m₁+m₂} DFT[f]_m
//! f_n = (2L)^{-2} Σ_m f̂_m e^{2πi x_n·ξ_m}
//! ```
//!
//! Values are stored row-major with the first coordinate as the row:
//! index `i * N + j` holds the sample at `(x_i, x_j)`.  Spectra use FFT
//! order: storage index `p` holds frequency index `m = p` for `p < N/2` and
//! `m = p - N` otherwise.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("N = {0} must be a power of two >= 4")]
    BadSize(usize),
    #[error("half-width L = {0} must be finite and positive")]
    BadWidth(f64),
    #[error("expected {expected} samples, got {got}")]
    Length { expected: usize, got: usize },
    #[error("grids differ: {0:?} vs {1:?}")]
    Mismatch(GridSpec, GridSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    /// Half-width `L` of the box.
    pub l: f64,
    /// Samples per axis.
    pub n: usize,
}

impl GridSpec {
    pub fn new(l: f64, n: usize) -> Result<Self, GridError> {
        let g = GridSpec { l, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.n < 4 || !self.n.is_power_of_two() {
            return Err(GridError::BadSize(self.n));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(GridError::BadWidth(self.l));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h()
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        [self.x(idx / self.n), self.x(idx % self.n)]
    }

    /// Signed frequency index of storage position `p`.
    pub fn freq_index(&self, p: usize) -> i64 {
        if p < self.n / 2 {
            p as i64
        } else {
            p as i64 - self.n as i64
        }
    }

    /// Storage position of signed frequency index `m`.
    pub fn freq_pos(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    /// Frequency spacing `1/(2L)`.
    pub fn dxi(&self) -> f64 {
        0.5 / self.l
    }

    pub fn xi(&self, idx: usize) -> [f64; 2] {
        let d = self.dxi();
        [self.freq_index(idx / self.n) as f64 * d, self.freq_index(idx % self.n) as f64 * d]
    }

    /// Largest frequency along an axis, `N / (4L)`.
    pub fn axis_band_limit(&self) -> f64 {
        self.n as f64 / (4.0 * self.l)
    }

    /// Largest `|ξ|` on the grid (the corner).
    pub fn corner_frequency(&self) -> f64 {
        self.axis_band_limit() * std::f64::consts::SQRT_2
    }
}

/// Cached 1-D plans for one grid size.
#[derive(Clone)]
pub struct FftPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FftPlan({})", self.n)
    }
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        FftPlan { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    fn run2(&self, data: &mut [Complex64], forward: bool) {
        let n = self.n;
        let plan = if forward { &self.fwd } else { &self.inv };
        plan.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = data[i * n + j];
            }
            plan.process(&mut col);
            for i in 0..n {
                data[i * n + j] = col[i];
            }
        }
    }

    /// Unnormalized 2-D DFT with kernel `e^{-2πi ...}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run2(data, true);
    }

    /// Unnormalized inverse 2-D DFT.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run2(data, false);
    }
}

fn alt_sign(spec: &GridSpec, idx: usize) -> f64 {
    let m = spec.freq_index(idx / spec.n) + spec.freq_index(idx % spec.n);
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Complex samples on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn from_values(spec: GridSpec, values: Vec<Complex64>) -> Result<Self, GridError> {
        if values.len() != spec.len() {
            return Err(GridError::Length { expected: spec.len(), got: values.len() });
        }
        Ok(GridFunction { spec, values })
    }

    pub fn from_real(spec: GridSpec, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = (0..spec.len()).map(|i| Complex64::new(f(spec.point(i)), 0.0)).collect();
        GridFunction { spec, values }
    }

    pub fn from_complex(spec: GridSpec, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..spec.len()).map(|i| f(spec.point(i))).collect();
        GridFunction { spec, values }
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// `h² Σ f ḡ`.
    pub fn inner(&self, o: &GridFunction) -> Complex64 {
        let h = self.spec.h();
        self.values.iter().zip(&o.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() * (h * h)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, o: &GridFunction) -> GridFunction {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect();
        GridFunction { spec: self.spec, values }
    }

    pub fn add(&self, o: &GridFunction) -> GridFunction {
        let values = self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect();
        GridFunction { spec: self.spec, values }
    }

    pub fn scale(&self, s: Complex64) -> GridFunction {
        GridFunction { spec: self.spec, values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn fourier(&self, plan: &FftPlan) -> Spectrum {
        let mut data = self.values.clone();
        plan.forward(&mut data);
        let h2 = self.spec.h().powi(2);
        for (i, v) in data.iter_mut().enumerate() {
            *v *= h2 * alt_sign(&self.spec, i);
        }
        Spectrum { spec: self.spec, values: data }
    }
}

/// Samples of `f̂` on the frequency grid (FFT order).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(spec: GridSpec) -> Self {
        Spectrum { spec, values: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        Spectrum { spec, values: (0..spec.len()).map(|i| f(spec.xi(i))).collect() }
    }

    pub fn inverse(&self, plan: &FftPlan) -> GridFunction {
        let mut data: Vec<Complex64> =
            self.values.iter().enumerate().map(|(i, v)| v * alt_sign(&self.spec, i)).collect();
        plan.inverse(&mut data);
        let s = (2.0 * self.spec.l).powi(-2);
        for v in data.iter_mut() {
            *v *= s;
        }
        GridFunction { spec: self.spec, values: data }
    }

    /// `‖f‖² = (2L)^{-2} Σ |f̂|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * (2.0 * self.spec.l).powi(-2)
    }

    pub fn sub(&self, o: &Spectrum) -> Spectrum {
        Spectrum { spec: self.spec, values: self.values.iter().zip(&o.values).map(|(a, b)| a - b).collect() }
    }
}

/// `⟨x⟩ = √(1 + |x|²)`.
pub fn japanese(x: [f64; 2]) -> f64 {
    (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_transform_matches_continuum() {
        let spec = GridSpec::new(4.0, 64).unwrap();
        let plan = FftPlan::new(64);
        let f = GridFunction::from_real(spec, |x| (-PI * (x[0] * x[0] + x[1] * x[1])).exp());
        let s = f.fourier(&plan);
        for (i, v) in s.values.iter().enumerate() {
            let xi = spec.xi(i);
            let e = (-PI * (xi[0] * xi[0] + xi[1] * xi[1])).exp();
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-12, "{xi:?}");
        }
        let back = s.inverse(&plan);
        assert!(back.sub(&f).max_abs() < 1e-14);
        assert!((s.norm_sqr() - f.l2_norm().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn spec_checks() {
        assert!(GridSpec::new(1.0, 48).is_err());
        assert!(GridSpec::new(0.0, 32).is_err());
        let g = GridSpec::new(2.0, 8).unwrap();
        assert_eq!(g.freq_index(5), -3);
        assert_eq!(g.freq_pos(-3), 5);
        assert_eq!(g.point(9), [-1.5, -1.5]);
    }
}
