//! Advection-reaction `s·∇u + κu = f`: mutilated sources, the explicit
//! integrating-factor solver and the operator `A`.
//!
//! The solution is `u(x) = ∫_0^∞ f(x - r s) e^{-∫_0^r κ(x - ρ s) dρ} dr`,
//! with the ray cut at the inflow edge of the box.  Along a ray the solver
//! runs the forward recurrence
//!
//! ```text
//! y_b = e^{-ΔK} y_a + Δ/2 (f_a e^{-ΔK} + f_b),    ΔK = Δ/2 (κ_a + κ_b)
//! ```
//!
//! which never forms `e^{K}` alone.  Sub-intervals are split where the ray
//! crosses a hyperplane of a mutilated source and use one-sided limits.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{Direction, Point};
use crate::grid::{japanese, FftPlan, GridFunction, GridSpec};

pub type Field = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdvectionError {
    #[error("absorption lower bound gamma = {0} must be positive")]
    Ellipticity(f64),
    #[error("kappa({x:?}) = {value} is below gamma = {gamma}")]
    Inconsistent { x: Point, value: f64, gamma: f64 },
    #[error("source grid {0:?} differs from target grid {1:?}")]
    Mismatch(GridSpec, GridSpec),
    #[error("substeps must be at least 1")]
    Substeps,
}

/// `{x : x·n = v}`; the positive side is `x·n > v`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Hyperplane {
    pub n: Direction,
    pub v: f64,
}

impl Hyperplane {
    pub fn level(&self, x: Point) -> f64 {
        self.n.dot(&x) - self.v
    }

    /// `H(x·n - v)` with `H(0) = 0`.
    pub fn heaviside(&self, x: Point) -> f64 {
        if self.level(x) > 0.0 {
            1.0
        } else {
            0.0
        }
    }

    pub fn flipped(&self) -> Hyperplane {
        Hyperplane { n: self.n.flipped(), v: -self.v }
    }
}

/// `f₀(x) + Σ fᵢ(x) H(x·nᵢ - vᵢ)`.
#[derive(Clone)]
pub struct MutilatedFunction {
    pub f0: Field,
    pub parts: Vec<(Field, Hyperplane)>,
}

impl std::fmt::Debug for MutilatedFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let planes: Vec<_> = self.parts.iter().map(|p| p.1).collect();
        f.debug_struct("MutilatedFunction").field("planes", &planes).finish()
    }
}

impl MutilatedFunction {
    pub fn smooth(f0: Field) -> Self {
        MutilatedFunction { f0, parts: Vec::new() }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.parts.iter().fold((self.f0)(x), |acc, (f, h)| acc + f(x) * h.heaviside(x))
    }

    /// Value with prescribed sides, for one-sided limits at an interface.
    pub fn eval_sided(&self, x: Point, sides: &[bool]) -> f64 {
        self.parts.iter().zip(sides).fold((self.f0)(x), |acc, ((f, _), &on)| if on { acc + f(x) } else { acc })
    }

    pub fn sides(&self, x: Point) -> Vec<bool> {
        self.parts.iter().map(|(_, h)| h.level(x) > 0.0).collect()
    }

    /// Same function off the hyperplane, with part `i` written on the other
    /// side: `fᵢ H(x·n - v) = fᵢ - fᵢ H(-x·n + v)`.
    pub fn flip_part(&self, i: usize) -> MutilatedFunction {
        let (fi, h) = self.parts[i].clone();
        let f0 = self.f0.clone();
        let g = fi.clone();
        let mut parts = self.parts.clone();
        parts[i] = (Arc::new(move |x| -fi(x)), h.flipped());
        MutilatedFunction { f0: Arc::new(move |x| f0(x) + g(x)), parts }
    }
}

pub fn eval_mutilated(mf: &MutilatedFunction, x: Point) -> f64 {
    mf.eval(x)
}

#[derive(Clone)]
pub struct AbsorptionField {
    pub kappa: Field,
    pub gamma: f64,
}

impl std::fmt::Debug for AbsorptionField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AbsorptionField(gamma = {})", self.gamma)
    }
}

impl AbsorptionField {
    pub fn constant(k: f64) -> Self {
        AbsorptionField { kappa: Arc::new(move |_| k), gamma: k }
    }

    /// Checks `γ > 0` and `κ ≥ γ` at every grid point.
    pub fn validate(&self, grid: &GridSpec) -> Result<(), AdvectionError> {
        if !(self.gamma > 0.0) {
            return Err(AdvectionError::Ellipticity(self.gamma));
        }
        (0..grid.len()).try_for_each(|i| {
            let x = grid.point(i);
            let value = (self.kappa)(x);
            if value >= self.gamma {
                Ok(())
            } else {
                Err(AdvectionError::Inconsistent { x, value, gamma: self.gamma })
            }
        })
    }
}

/// What the solver integrates.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    /// Samples, read by periodic bilinear interpolation off the grid.
    Grid(&'a GridFunction),
    Mutilated(&'a MutilatedFunction),
}

impl Source<'_> {
    fn planes(&self) -> Vec<Hyperplane> {
        match self {
            Source::Grid(_) => Vec::new(),
            Source::Mutilated(m) => m.parts.iter().map(|p| p.1).collect(),
        }
    }

    fn eval(&self, x: Point, sides: &[bool]) -> f64 {
        match self {
            Source::Grid(g) => bilinear(g, x),
            Source::Mutilated(m) => m.eval_sided(x, sides),
        }
    }
}

/// Periodic bilinear interpolation of the real part.
pub fn bilinear(g: &GridFunction, x: Point) -> f64 {
    let n = g.spec.n;
    let h = g.spec.h();
    let l = g.spec.l;
    let pos = |c: f64| {
        let t = (c + l) / h;
        let i = t.floor();
        ((i as i64).rem_euclid(n as i64) as usize, t - i)
    };
    let (i0, a) = pos(x[0]);
    let (j0, b) = pos(x[1]);
    let (i1, j1) = ((i0 + 1) % n, (j0 + 1) % n);
    let v = |i: usize, j: usize| g.values[i * n + j].re;
    (1.0 - a) * ((1.0 - b) * v(i0, j0) + b * v(i0, j1)) + a * ((1.0 - b) * v(i1, j0) + b * v(i1, j1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Quadrature steps per grid spacing along the ray.
    pub substeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { substeps: 2 }
    }
}

fn is_axis(s: &Direction) -> bool {
    s.x() == 0.0 || s.y() == 0.0
}

/// Forward recurrence along `p0 + t s`, `t ∈ [0, emits.last]`; returns the
/// solution at each emission distance.
fn walk(src: &Source, planes: &[Hyperplane], kappa: &Field, p0: Point, s: &Direction, emits: &[f64], dt: f64) -> Vec<f64> {
    let end = match emits.last() {
        Some(&e) => e,
        None => return Vec::new(),
    };
    let at = |t: f64| [p0[0] + t * s.x(), p0[1] + t * s.y()];
    let mut cuts: Vec<f64> = (1..).map(|m| m as f64 * dt).take_while(|&t| t < end).collect();
    for h in planes {
        let sn = s.dot(&h.n.components());
        if sn != 0.0 {
            let t = -h.level(p0) / sn;
            if t > 0.0 && t < end {
                cuts.push(t);
            }
        }
    }
    cuts.extend_from_slice(emits);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + end));
    let mut out = Vec::with_capacity(emits.len());
    let mut next_emit = emits.iter().peekable();
    let (mut y, mut ta) = (0.0, 0.0);
    let mut ka = kappa(p0);
    while next_emit.peek().is_some_and(|&&e| e <= 1e-12 * (1.0 + end)) {
        out.push(0.0);
        next_emit.next();
    }
    for &tb in &cuts {
        let (pa, pb) = (at(ta), at(tb));
        let sides: Vec<bool> = planes.iter().map(|h| h.level(at(0.5 * (ta + tb))) > 0.0).collect();
        let kb = kappa(pb);
        let d = tb - ta;
        let decay = (-0.5 * d * (ka + kb)).exp();
        y = decay * y + 0.5 * d * (src.eval(pa, &sides) * decay + src.eval(pb, &sides));
        while next_emit.peek().is_some_and(|&&e| (e - tb).abs() < 1e-12 * (1.0 + end)) {
            out.push(y);
            next_emit.next();
        }
        ta = tb;
        ka = kb;
    }
    out
}

/// Distance from `x` back along `-s` to the box edge.
fn inflow_distance(x: Point, s: &Direction, l: f64) -> f64 {
    [0, 1]
        .iter()
        .map(|&i| {
            let si = s.components()[i];
            if si > 0.0 {
                (x[i] + l) / si
            } else if si < 0.0 {
                (x[i] - l) / si
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Solve `s·∇u + κu = f` on the grid.
pub fn solve(
    src: Source,
    kappa: &AbsorptionField,
    s: &Direction,
    grid: GridSpec,
    opts: SolveOptions,
) -> Result<GridFunction, AdvectionError> {
    kappa.validate(&grid)?;
    if opts.substeps == 0 {
        return Err(AdvectionError::Substeps);
    }
    if let Source::Grid(g) = src {
        if g.spec != grid {
            return Err(AdvectionError::Mismatch(g.spec, grid));
        }
    }
    let planes = src.planes();
    let n = grid.n;
    let h = grid.h();
    let dt = h / opts.substeps as f64;
    let k = &kappa.kappa;
    let mut out = GridFunction::zeros(grid);
    if is_axis(s) {
        // grid lines parallel to s: one walk per line
        let along_first = s.y() == 0.0;
        let forward = s.x() + s.y() > 0.0;
        let lines: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|line| {
                let idx = |m: usize| if along_first { m * n + line } else { line * n + m };
                let order: Vec<usize> = if forward { (0..n).collect() } else { (0..n).rev().collect() };
                let first = grid.point(idx(order[0]));
                let lead = inflow_distance(first, s, grid.l);
                let p0 = [first[0] - lead * s.x(), first[1] - lead * s.y()];
                let emits: Vec<f64> = (0..n).map(|m| lead + m as f64 * h).collect();
                let vals = walk(&src, &planes, k, p0, s, &emits, dt);
                order.into_iter().map(idx).zip(vals).collect()
            })
            .collect();
        for (i, v) in lines.into_iter().flatten() {
            out.values[i] = Complex64::new(v, 0.0);
        }
    } else {
        let vals: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let x = grid.point(i);
                let r = inflow_distance(x, s, grid.l);
                let p0 = [x[0] - r * s.x(), x[1] - r * s.y()];
                walk(&src, &planes, k, p0, s, &[r], dt)[0]
            })
            .collect();
        for (o, v) in out.values.iter_mut().zip(vals) {
            *o = Complex64::new(v, 0.0);
        }
    }
    Ok(out)
}

/// `s·∇u + κu` with the derivative taken spectrally (multiplier `2πi s·ξ`,
/// zero on the Nyquist lines).
pub fn apply_a(u: &GridFunction, kappa: &AbsorptionField, s: &Direction) -> GridFunction {
    let grid = u.spec;
    let plan = FftPlan::new(grid.n);
    let mut spec = u.fourier(&plan);
    let nyq = -(grid.n as i64) / 2;
    for (p, v) in spec.values.iter_mut().enumerate() {
        let (a, b) = (grid.freq_index(p / grid.n), grid.freq_index(p % grid.n));
        if a == nyq || b == nyq {
            *v = Complex64::new(0.0, 0.0);
            continue;
        }
        let xi = grid.xi(p);
        *v *= Complex64::new(0.0, 2.0 * PI * s.dot(&xi));
    }
    let mut d = spec.inverse(&plan);
    for (i, v) in d.values.iter_mut().enumerate() {
        *v += u.values[i] * (kappa.kappa)(grid.point(i));
    }
    d
}

/// `sup_x |u(x)| ⟨x⟩^{2n}` over the grid.
pub fn decay_envelope_check(u: &GridFunction, n: u32) -> f64 {
    u.values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm() * japanese(u.spec.point(i)).powi(2 * n as i32))
        .fold(0.0, f64::max)
}

pub const SPLIT_OVERSAMPLE: usize = 4;

fn cis(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

/// Relative discrepancy between the two sides of
///
/// ```text
/// f̂(ξ) = -i/(2π|ξ|²) ξ·F[H(y₁ - v) ∇g](ξ) - i ξ₁/(2π|ξ|²) e^{-2πi v ξ₁} F₁[g(v, ·)](ξ₂)
/// ```
///
/// for `f = H(y₁ - v) g` in coordinates `y = R x` where `n` maps to `e₁`,
/// over the frequencies of `grid` with `|ξ| > 1`.  The transforms are
/// computed on a grid refined by [`SPLIT_OVERSAMPLE`] to push the aliasing
/// of the jump (`f̂ ~ 1/|ξ|`) away from the compared band.  Samples on the
/// interface get weight 1/2 (trapezoid rule across the jump); `∇g` is
/// taken spectrally.
pub fn fourier_split_check(g: &(dyn Fn(Point) -> f64 + Sync), n: &Direction, v: f64, coarse: GridSpec) -> f64 {
    let grid = GridSpec { l: coarse.l, n: coarse.n * SPLIT_OVERSAMPLE };
    let half = (coarse.n / 2) as i64;
    let rot = crate::geometry::rotation_to_e1(n);
    let gy = |y: Point| g(rot.apply_inv(y));
    let plan = FftPlan::new(grid.n);
    let hw = |y: Point| {
        let d = y[0] - v;
        if d.abs() < 1e-12 {
            0.5
        } else if d > 0.0 {
            1.0
        } else {
            0.0
        }
    };
    let gs = GridFunction::from_real(grid, gy);
    let lhs = GridFunction::from_real(grid, |y| hw(y) * gy(y)).fourier(&plan);
    let gh = gs.fourier(&plan);
    let nyq = -(grid.n as i64) / 2;
    let grad = |axis: usize| {
        let mut d = gh.clone();
        for (p, val) in d.values.iter_mut().enumerate() {
            let m = [grid.freq_index(p / grid.n), grid.freq_index(p % grid.n)];
            if m[axis] == nyq {
                *val = Complex64::new(0.0, 0.0);
            } else {
                *val *= Complex64::new(0.0, 2.0 * PI * grid.xi(p)[axis]);
            }
        }
        let mut field = d.inverse(&plan);
        for (i, val) in field.values.iter_mut().enumerate() {
            *val *= hw(grid.point(i));
        }
        field.fourier(&plan)
    };
    let (g1, g2) = (grad(0), grad(1));
    // one-dimensional transform of the trace on the sample line y₁ = v
    let h = grid.h();
    let trace: Vec<f64> = (0..grid.n).map(|j| gy([v, grid.x(j)])).collect();
    let trace_hat: Vec<Complex64> = (0..grid.n)
        .map(|q| {
            let xi2 = grid.freq_index(q) as f64 * grid.dxi();
            trace.iter().enumerate().map(|(j, t)| *t * cis(-2.0 * PI * grid.x(j) * xi2)).sum::<Complex64>() * h
        })
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for p in 0..grid.len() {
        let m = [grid.freq_index(p / grid.n), grid.freq_index(p % grid.n)];
        if m.iter().any(|&mi| mi < -half || mi >= half) {
            continue;
        }
        let xi = grid.xi(p);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if r2 <= 1.0 {
            continue;
        }
        let fac = Complex64::new(0.0, -1.0 / (2.0 * PI * r2));
        let reg = fac * (g1.values[p] * xi[0] + g2.values[p] * xi[1]);
        let sing = fac * xi[0] * cis(-2.0 * PI * v * xi[0]) * trace_hat[p % grid.n];
        let r = reg + sing;
        num += (lhs.values[p] - r).norm_sqr();
        den += lhs.values[p].norm_sqr();
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutilated_examples() {
        let one: Field = Arc::new(|_| 1.0);
        let zero: Field = Arc::new(|_| 0.0);
        let m = MutilatedFunction { f0: zero, parts: vec![(one, Hyperplane { n: Direction::e1(), v: 0.0 })] };
        assert_eq!(m.eval([1.0, 0.0]), 1.0);
        assert_eq!(m.eval([0.0, 3.0]), 0.0);
        let f = m.flip_part(0);
        assert_eq!(f.eval([1.0, 0.0]), 1.0);
        assert_eq!(f.eval([-1.0, 0.0]), 0.0);
    }

    #[test]
    fn inflow() {
        let s = Direction::from_angle(0.4);
        let x = [0.3, -0.2];
        let r = inflow_distance(x, &s, 2.0);
        let p = [x[0] - r * s.x(), x[1] - r * s.y()];
        assert!((p[0] + 2.0).abs() < 1e-12 || (p[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_fields() {
        let g = GridSpec::new(2.0, 16).unwrap();
        assert_eq!(AbsorptionField::constant(0.0).validate(&g), Err(AdvectionError::Ellipticity(0.0)));
        let k = AbsorptionField { kappa: Arc::new(|x| 1.0 + x[0]), gamma: 0.5 };
        assert!(matches!(k.validate(&g), Err(AdvectionError::Inconsistent { .. })));
    }
}
