//! Decreasing rearrangements, Lorentz quasi-norms, decay fits and N-term
//! error curves.

use num_complex::Complex64;
use thiserror::Error;

use crate::frame::{WeightRule, WindowBank};
use crate::grid::{FftPlan, GridFunction, Spectrum};
use crate::xform::{accumulate_atom, synthesize_spectrum, CoefficientSet, XformError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("exponent p = {p}, q = {q} outside 0 < p < inf, 0 < q <= inf")]
    Exponent { p: f64, q: f64 },
    #[error("fit window [{0}, {1}] invalid for a sequence of length {2} (need >= 10 points)")]
    Window(usize, usize, usize),
    #[error("sizes must be increasing")]
    Sizes,
    #[error(transparent)]
    Xform(#[from] XformError),
}

/// Nonincreasing magnitudes with the permutation that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedSequence {
    pub values: Vec<f64>,
    /// `values[i] = |input[perm[i]]|`.
    pub perm: Vec<usize>,
}

/// Sort magnitudes descending; equal magnitudes keep input order, so inputs
/// listed in index order get the index tie-break.
pub fn rearrange(values: &[f64]) -> RearrangedSequence {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[b].abs().total_cmp(&values[a].abs()).then(a.cmp(&b)));
    RearrangedSequence { values: perm.iter().map(|&i| values[i].abs()).collect(), perm }
}

impl RearrangedSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn check_exponents(p: f64, q: f64) -> Result<(), SeqError> {
    if p > 0.0 && p.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(SeqError::Exponent { p, q })
    }
}

/// `(Σ (c*_n)^q n^{q/p - 1})^{1/q}`, or `sup c*_n n^{1/p}` for `q = ∞`.
pub fn lorentz_norm(seq: &RearrangedSequence, p: f64, q: f64) -> Result<f64, SeqError> {
    check_exponents(p, q)?;
    if q.is_infinite() {
        return weak_lp_norm(seq, p);
    }
    let s: f64 = seq
        .values
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let n = (i + 1) as f64;
            c.powf(q) * n.powf(q / p - 1.0)
        })
        .sum();
    Ok(s.powf(1.0 / q))
}

pub fn weak_lp_norm(seq: &RearrangedSequence, p: f64) -> Result<f64, SeqError> {
    check_exponents(p, f64::INFINITY)?;
    Ok(seq
        .values
        .iter()
        .enumerate()
        .map(|(i, c)| c * ((i + 1) as f64).powf(1.0 / p))
        .fold(0.0, f64::max))
}

/// Least-squares power law over a window of the rearranged sequence.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DecayFit {
    pub slope: f64,
    /// `-1/slope`; `None` when the sequence does not decay.
    pub p_hat: Option<f64>,
    /// RMS residual of the fit in natural-log units.
    pub residual: f64,
    pub window: (usize, usize),
    pub benchmark: Option<Benchmark>,
}

/// `p* = (t/d + 1/2)^{-1}` and the observed slack `p̂ - p*`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Benchmark {
    pub t: f64,
    pub d: f64,
    pub p_star: f64,
    pub slack: Option<f64>,
}

impl DecayFit {
    pub fn decaying(&self) -> bool {
        self.p_hat.is_some()
    }

    pub fn with_benchmark(mut self, t: f64, d: f64) -> Self {
        let p_star = 1.0 / (t / d + 0.5);
        self.benchmark = Some(Benchmark { t, d, p_star, slack: self.p_hat.map(|p| p - p_star) });
        self
    }
}

/// Fit `log c*_n` against `log n` for `n ∈ [n1, n2]` (1-based); zero
/// entries are skipped.
pub fn fit_decay_exponent(seq: &RearrangedSequence, window: (usize, usize)) -> Result<DecayFit, SeqError> {
    let (n1, n2) = window;
    if n1 < 1 || n2 > seq.len() || n2 < n1 + 9 {
        return Err(SeqError::Window(n1, n2, seq.len()));
    }
    let pts: Vec<(f64, f64)> =
        (n1..=n2).filter(|&n| seq.values[n - 1] > 0.0).map(|n| ((n as f64).ln(), seq.values[n - 1].ln())).collect();
    if pts.len() < 2 {
        return Ok(DecayFit { slope: 0.0, p_hat: None, residual: 0.0, window, benchmark: None });
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let residual = (pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum::<f64>() / k).sqrt();
    // a flat sequence fits with slope ~ 1e-17, not a decay
    let p_hat = (slope < -1e-12).then(|| -1.0 / slope);
    Ok(DecayFit { slope, p_hat, residual, window, benchmark: None })
}

/// Which coefficients are kept and how the error is weighted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NtermNorm {
    L2,
    Hs(WeightRule),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub error_l2: f64,
    pub error_hs: f64,
}

/// Beyond this many new atoms a block synthesis beats incremental updates.
const INCREMENTAL_LIMIT: usize = 200_000;

/// Errors of the `N`-term approximations `f_N = Σ_{N largest} c_λ φ_λ`.
///
/// `error_l2 = ‖f - f_N‖` on the grid.  `error_hs` is the weighted ℓ² norm
/// of the discarded coefficients; it uses `hs_rule` (or unit weights when
/// absent).  With [`NtermNorm::Hs`] the selection ranks `w_λ |c_λ|`.
pub fn nterm_error_curve(
    c: &CoefficientSet,
    bank: &WindowBank,
    f: &GridFunction,
    norm: NtermNorm,
    hs_rule: Option<&WeightRule>,
    ns: &[usize],
) -> Result<Vec<CurvePoint>, SeqError> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SeqError::Sizes);
    }
    let rule = match norm {
        NtermNorm::Hs(r) => Some(r),
        NtermNorm::L2 => hs_rule.copied(),
    };
    let w = |j: u32, l: u32| rule.map_or(1.0, |r| r.weight(j, l));
    let mut entries: Vec<_> = c.iter().collect();
    let key = |e: &(crate::geometry::FrameIndex, Complex64)| match norm {
        NtermNorm::L2 => e.1.norm(),
        NtermNorm::Hs(r) => r.weight(e.0.j, e.0.l) * e.1.norm(),
    };
    entries.sort_by(|a, b| key(b).total_cmp(&key(a)).then(a.0.cmp(&b.0)));
    // suffix sums of the weighted energy for the tail norm
    let mut tail = vec![0.0f64; entries.len() + 1];
    for i in (0..entries.len()).rev() {
        let (lam, v) = entries[i];
        tail[i] = tail[i + 1] + (w(lam.j, lam.l) * v.norm()).powi(2);
    }
    let fh = f.fourier(&FftPlan::new(f.spec.n));
    let mut acc = Spectrum::zeros(bank.grid);
    let mut done = 0usize;
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        let n_eff = n.min(entries.len());
        if n_eff - done > INCREMENTAL_LIMIT {
            let mut part = CoefficientSet::zeros(bank);
            for (lam, v) in &entries[..n_eff] {
                part.set(lam, *v)?;
            }
            acc = synthesize_spectrum(&part, bank)?;
        } else {
            for (lam, v) in &entries[done..n_eff] {
                accumulate_atom(&mut acc, bank, lam, *v)?;
            }
        }
        done = n_eff;
        out.push(CurvePoint { n, error_l2: fh.sub(&acc).norm_sqr().sqrt(), error_hs: tail[n_eff].sqrt() });
    }
    Ok(out)
}

/// Log-spaced sizes `round(2^{a + i/per_octave})` from `2^a` to `2^b`, deduplicated.
pub fn log_sizes(a: u32, b: u32, per_octave: u32) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=(b - a) * per_octave)
        .map(|i| (a as f64 + i as f64 / per_octave as f64).exp2().round() as usize)
        .collect();
    v.dedup();
    v
}

/// Local slopes `d log₂ e / d log₂ N` by central differences (one-sided
/// at the ends); points with zero error are skipped.
pub fn local_slopes(curve: &[CurvePoint]) -> Vec<(usize, f64)> {
    let pts: Vec<(usize, f64, f64)> = curve
        .iter()
        .filter(|p| p.n > 0 && p.error_l2 > 0.0)
        .map(|p| (p.n, (p.n as f64).log2(), p.error_l2.log2()))
        .collect();
    (0..pts.len())
        .filter(|_| pts.len() >= 2)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(pts.len() - 1));
            (pts[i].0, (pts[b].2 - pts[a].2) / (pts[b].1 - pts[a].1))
        })
        .collect()
}

/// Slope at the curve point nearest to `n` in log scale.
pub fn slope_at(curve: &[CurvePoint], n: usize) -> Option<f64> {
    let t = (n as f64).log2();
    local_slopes(curve)
        .into_iter()
        .min_by(|a, b| ((a.0 as f64).log2() - t).abs().total_cmp(&((b.0 as f64).log2() - t).abs()))
        .map(|s| s.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrange_examples() {
        let r = rearrange(&[0.1, 3.0, 2.0]);
        assert_eq!(r.values, vec![3.0, 2.0, 0.1]);
        assert_eq!(r.perm, vec![1, 2, 0]);
        let eq = rearrange(&[1.0, -1.0, 1.0]);
        assert_eq!(eq.perm, vec![0, 1, 2]);
        assert_eq!(rearrange(&r.values).values, r.values);
    }

    #[test]
    fn weak_norm_of_power_law() {
        let p = 1.5;
        let v: Vec<f64> = (1..=10_000).map(|n| (n as f64).powf(-1.0 / p)).collect();
        let s = rearrange(&v);
        assert!((weak_lp_norm(&s, p).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(lorentz_norm(&rearrange(&[]), 1.0, 2.0).unwrap(), 0.0);
        assert!(lorentz_norm(&s, 0.0, 1.0).is_err());
    }

    #[test]
    fn fits() {
        let v: Vec<f64> = (1..=1000).map(|n| (n as f64).powi(-2)).collect();
        let f = fit_decay_exponent(&rearrange(&v), (10, 1000)).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.p_hat.unwrap() - 0.5).abs() < 1e-12);
        let c = fit_decay_exponent(&rearrange(&[2.0; 50]), (1, 50)).unwrap();
        assert!(!c.decaying());
        assert!(fit_decay_exponent(&rearrange(&[1.0; 5]), (1, 5)).is_err());
        let b = f.with_benchmark(2.0, 2.0).benchmark.unwrap();
        assert!((b.p_star - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sizes_and_slopes() {
        assert_eq!(log_sizes(0, 2, 2), vec![1, 2, 3, 4]);
        let curve: Vec<CurvePoint> =
            [1usize, 2, 4, 8].iter().map(|&n| CurvePoint { n, error_l2: 1.0 / (n * n) as f64, error_hs: 0.0 }).collect();
        assert!(local_slopes(&curve).iter().all(|s| (s.1 + 2.0).abs() < 1e-12));
        assert!((slope_at(&curve, 5).unwrap() + 2.0).abs() < 1e-12);
    }
}
