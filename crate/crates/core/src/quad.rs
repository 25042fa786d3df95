//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Intervals are kept in a max-heap keyed by their error estimate and the
//! worst one is bisected until the summed estimate drops below the requested
//! tolerance.  Integrals over the real line map their tails rationally onto finite
//! intervals, which turns algebraic decay into smooth endpoint behaviour.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    NotConverged { estimate: f64, error: f64 },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

/// Value and error estimate of a converged integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = h * x;
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        if !f1.is_finite() {
            return Err(QuadError::NonFinite(c - dx));
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite(c + dx));
        }
        kronrod += w * (f1 + f2);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Composite 15-point Kronrod rule on `panels` equal panels; for smooth
/// integrands where the oscillation count is known in advance.
pub fn fixed_panels<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> Result<f64, QuadError> {
    let w = (b - a) / panels.max(1) as f64;
    (0..panels.max(1)).map(|i| gk15(&mut f, a + i as f64 * w, a + (i + 1) as f64 * w).map(|r| r.0)).sum()
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 0.0, max_segments: 20_000 }
    }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// partition given by the sorted breakpoints.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<Estimate, QuadError> {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        total += v;
        err += e;
        heap.push(Segment { a: w[0], b: w[1], value: v, error: e });
    }
    loop {
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            // the running sums drift by roughly eps times their largest past
            // value; confirm against a fresh sum before stopping
            (total, err) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
            if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
                break;
            }
        }
        if heap.len() >= opts.max_segments {
            return Err(QuadError::NotConverged { estimate: total, error: err });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            return Err(QuadError::NotConverged { estimate: total, error: err });
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid)?;
        let (v2, e2) = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // re-sum to shed the drift of the incremental updates
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(Estimate { value, error, evaluations })
}

/// Maps `x` on the real line to `u` in `(-1, 1)` with `x = u / (1 - u^2)`.
pub fn to_unit(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        2.0 * x / (1.0 + (1.0 + 4.0 * x * x).sqrt())
    }
}

/// Integrates `f` over the real line.  `features` are abscissae where the
/// integrand has structure (peaks, scales); they seed the partition.
///
/// The hull `[lo, hi]` of the features (padded by its own width) is
/// integrated in `x` itself, so sample points near a narrow peak are exact
/// up to the spacing of floats there.  The tails use `x = hi + s t / (1 - t)`
/// and its mirror, placed on `[hi, hi + 1]` and `[lo - 1, lo]` of the same
/// parameter so the adaptivity stays global.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    features: &[f64],
    opts: QuadOptions,
) -> Result<Estimate, QuadError> {
    let mut xs: Vec<f64> = features.iter().copied().filter(|x| x.is_finite()).collect();
    if xs.is_empty() {
        xs.push(0.0);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let span = (xs[xs.len() - 1] - xs[0]).max(1.0);
    let lo = xs[0] - span;
    let hi = xs[xs.len() - 1] + span;
    let mut taus = xs;
    taus.extend([lo - 1.0, lo - 0.5, lo, hi, hi + 0.5, hi + 1.0]);
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let g = |tau: f64| {
        let (x, jac) = if tau < lo {
            let t = lo - tau;
            if t >= 1.0 {
                return 0.0;
            }
            (lo - span * t / (1.0 - t), span / ((1.0 - t) * (1.0 - t)))
        } else if tau <= hi {
            (tau, 1.0)
        } else {
            let t = tau - hi;
            if t >= 1.0 {
                return 0.0;
            }
            (hi + span * t / (1.0 - t), span / ((1.0 - t) * (1.0 - t)))
        };
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, &taus, opts)
}
