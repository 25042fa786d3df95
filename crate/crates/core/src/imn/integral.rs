//! Three independent evaluations of `I_{m,n}`.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::cmn::cmn_table_f64;
use super::{ImnError, ImnParams};
use crate::quad::{integrate_real_line, QuadError, QuadOptions};
use crate::series::{BiSeries, Series};

/// Closed form over the coefficient table.  The monomials are scaled by
/// `√δ₊` so every factor stays in `[0, 1]`; all terms are nonnegative, so the
/// sum is free of cancellation.
pub fn imn_closed_form(p: &ImnParams) -> f64 {
    let (m, n) = (p.m, p.n);
    let dp = p.delta_plus();
    let s = dp.sqrt();
    let cc = p.c / s;
    let aa = p.a * p.d / s;
    let bb = (p.a * p.b).abs() / s;
    let top = 2 * (m + n) as usize - 3;
    let size = top + 1;
    let table = cmn_table_f64(m, n);
    let pw = |x: f64| -> Vec<f64> {
        let mut v = vec![1.0; size];
        for k in 1..size {
            v[k] = v[k - 1] * x;
        }
        v
    };
    let (pc, pa, pb) = (pw(cc), pw(aa), pw(bb));
    let mut acc = 0.0;
    for i in 0..size {
        for j in 0..(size - i) {
            let cij = table[i * size + j];
            if cij != 0.0 {
                acc += cij * pc[i] * pa[j] * pb[top - i - j];
            }
        }
    }
    PI / (s * p.c.powi(2 * m as i32 - 1) * p.d.powi(2 * n as i32 - 1)) * acc
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite parameter")
}

/// Taylor coefficient extraction from the generating function
///
/// ```text
/// Σ I_{m,n} y^{m-1} z^{n-1} = π / (√(c²-y) √(d²-z)) · (√(c²-y) + a√(d²-z)) / ((√(c²-y) + a√(d²-z))² + a²b²)
/// ```
///
/// carried out in exact rational arithmetic on the inputs (which are dyadic
/// rationals).  With `y = c² Y`, `z = d² Z` the square roots become
/// `c√(1-Y)` and `d√(1-Z)`.
pub fn imn_generating_series(p: &ImnParams) -> Result<f64, ImnError> {
    p.validate()?;
    let (pm, qn) = (p.m as usize - 1, p.n as usize - 1);
    let c = exact(p.c);
    let ad = exact(p.a) * exact(p.d);
    let ab = exact(p.a) * exact(p.b);
    let one_minus = |order: usize| {
        Series::from_coeffs(vec![BigRational::one(), -BigRational::one()], order)
            .sqrt_newton()
            .expect("unit constant term")
    };
    let v = BiSeries::from_univariate(&one_minus(pm), false, pm, qn);
    let w = BiSeries::from_univariate(&one_minus(qn), true, pm, qn);
    let num = v.scale(&c).add(&w.scale(&ad));
    let den = num.mul(&num).add(&BiSeries::constant(&ab * &ab, pm, qn)).mul(&v).mul(&w);
    let q = num
        .div(&den)
        .ok_or_else(|| ImnError::InvalidParams("degenerate series denominator".into()))?;
    let coeff = q.get(pm, qn);
    if coeff.is_zero() {
        return Ok(0.0);
    }
    let val = coeff.to_f64().unwrap_or(f64::NAN);
    Ok(PI * val / (p.c.powi(2 * p.m as i32 - 1) * p.d.powi(2 * p.n as i32 - 1)))
}

/// Adaptive quadrature of the integrand over the real line.  The partition
/// is seeded at the two peaks and at geometric multiples of their widths.
pub fn imn_quadrature(p: &ImnParams, tol: f64) -> Result<f64, ImnError> {
    p.validate()?;
    if !(tol >= 1e-12) {
        return Err(ImnError::InvalidParams(format!("tolerance {tol} below 1e-12")));
    }
    // geometric ladders around both peaks: a GK rule on a segment whose end
    // sits next to a narrow peak sees none of its algebraic shoulder
    let ladder = |centre: f64, width: f64, out: &mut Vec<f64>| {
        out.push(centre);
        let mut s = width;
        while s < 1e3 * (1.0 + p.b.abs() + p.d) {
            out.push(centre - s);
            out.push(centre + s);
            s *= 4.0;
        }
    };
    // the variable is the offset from b, so (x - b) is exact near the narrow
    // peak of the first factor
    let mut features = Vec::new();
    ladder(-p.b, p.d, &mut features);
    if p.a > 0.0 {
        ladder(0.0, p.c / p.a, &mut features);
    }
    let f = |t: f64| {
        let u = p.a * t;
        let x = t + p.b;
        (u * u + p.c * p.c).powi(-(p.m as i32)) * (x * x + p.d * p.d).powi(-(p.n as i32))
    };
    // a flat first factor only rescales the integrand; keep the numbers tame
    let scale = f(0.0).max(f(-p.b));
    let opts = QuadOptions { rel_tol: tol, abs_tol: 0.0, max_segments: 50_000 };
    let res = integrate_real_line(|t| f(t) / scale, &features, opts);
    match res {
        Ok(est) => Ok(est.value * scale),
        Err(QuadError::NotConverged { estimate, error }) => {
            Err(ImnError::Accuracy { estimate: estimate * scale, error: error * scale })
        }
        Err(QuadError::NonFinite(x)) => Err(ImnError::InvalidParams(format!("integrand not finite at {x}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn base_values() {
        let p = ImnParams::new(1, 1, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(rel(imn_closed_form(&p), PI / 2.0) < 1e-14);
        assert!(rel(imn_quadrature(&p, 1e-10).unwrap(), PI / 2.0) < 1e-9);
        assert!(rel(imn_generating_series(&p).unwrap(), PI / 2.0) < 1e-14);
    }

    #[test]
    fn one_one_formula() {
        let (a, b, c, d) = (0.7, -1.3, 0.4, 2.5);
        let p = ImnParams::new(1, 1, a, b, c, d).unwrap();
        let s = c + a * d;
        let expect = PI * s / (c * d * (s * s + a * a * b * b));
        assert!(rel(imn_closed_form(&p), expect) < 1e-13);
        assert!(rel(imn_quadrature(&p, 1e-10).unwrap(), expect) < 1e-8);
    }

    #[test]
    fn a_zero_reduces_to_single_factor() {
        let p = ImnParams::new(1, 2, 0.0, 3.0, 1.0, 1.0).unwrap();
        assert!(rel(imn_quadrature(&p, 1e-10).unwrap(), PI / 2.0) < 1e-9);
        let p = ImnParams::new(3, 2, 0.0, 3.0, 0.5, 2.0).unwrap();
        let expect = 0.5f64.powi(-6) * super::super::single_factor_integral(2, 1.0, 2.0).unwrap();
        assert!(rel(imn_closed_form(&p), expect) < 1e-13);
        assert!(rel(imn_generating_series(&p).unwrap(), expect) < 1e-13);
    }

    #[test]
    fn three_paths_moderate() {
        for (m, n) in [(2, 3), (4, 1), (3, 3)] {
            let p = ImnParams::new(m, n, 2.5, 0.75, 0.3, 1.7).unwrap();
            let cf = imn_closed_form(&p);
            assert!(rel(imn_generating_series(&p).unwrap(), cf) < 1e-12);
            assert!(rel(imn_quadrature(&p, 1e-10).unwrap(), cf) < 1e-8);
        }
    }
}
