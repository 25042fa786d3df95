//! Two-term upper bounds for `I_{m,n}` and its higher-dimensional analogue.

use super::integral::imn_closed_form;
use super::{ImnError, ImnParams};
use crate::quad::{integrate_real_line, QuadError, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    /// Denominator `δ₊ = (c + ad)² + a²b²`.
    Best,
    /// Denominator `a²b² + a²d² + c²`.
    Simple,
}

fn bound_at(p: &ImnParams, variant: BoundVariant) -> f64 {
    let den = match variant {
        BoundVariant::Best => p.delta_plus(),
        BoundVariant::Simple => (p.a * p.b).powi(2) + (p.a * p.d).powi(2) + p.c * p.c,
    };
    let (m, n) = (p.m as i32, p.n as i32);
    p.a.powi(2 * n - 1) / (den.powi(n) * p.c.powi(2 * m - 1)) + 1.0 / (den.powi(m) * p.d.powi(2 * n - 1))
}

/// The two-term bound.  With `clamp_a` and `a > 1` the integrand is first
/// dominated by its `a = 1` version, and the smaller of the two bounds is
/// returned.
pub fn upper_bound(p: &ImnParams, variant: BoundVariant, clamp_a: bool) -> f64 {
    let v = bound_at(p, variant);
    if clamp_a && p.a > 1.0 {
        v.min(bound_at(&ImnParams { a: 1.0, ..*p }, variant))
    } else {
        v
    }
}

/// The weaker comparison bound with a three-factor second term.  Infinite
/// for `a = 0`.
pub fn grafakos_bound(p: &ImnParams) -> f64 {
    let (m, n) = (p.m as i32, p.n as i32);
    let first = 1.0 / p.a / ((p.b * p.b + p.d * p.d).powi(n) * p.c.powi(2 * m - 1));
    let second = 1.0 / (((p.a * p.b).powi(2) + p.c * p.c).powi(n) * p.c.powi(2 * (m - n)) * p.d.powi(2 * n - 1));
    first + second
}

/// Both sides of the `k`-dimensional inequality
/// `∫ (|x-t|² + c²)^{-m} (|x|² + d²)^{-n} dx ≲ T^{-n} c^{k-2m} + T^{-m} d^{k-2n}`
/// with `T = |t|² + c² + d²`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ConvCheck {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

impl ConvCheck {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// The left side is reduced to one dimension: along `t` the inner integral
/// is `I_{m,n}` with `a = 1`, `b = |t|`, `c² + ρ²`, `d² + ρ²`, where `ρ` is the
/// distance to the `t` axis.  The remaining radial integral is done by
/// quadrature.
pub fn conv_bound_check(k: usize, m: u32, n: u32, c: f64, d: f64, t: &[f64]) -> Result<ConvCheck, ImnError> {
    if !(1..=3).contains(&k) {
        return Err(ImnError::UnsupportedDimension(k));
    }
    if t.len() != k {
        return Err(ImnError::InvalidParams(format!("t has {} components, expected {k}", t.len())));
    }
    let half = k.div_ceil(2) as u32;
    if m < half || n < half {
        return Err(ImnError::InvalidParams(format!("m, n must be at least {half} in dimension {k}")));
    }
    let tn = t.iter().map(|x| x * x).sum::<f64>().sqrt();
    let base = ImnParams::new(m, n, 1.0, tn, c, d)?;
    let lhs = if k == 1 {
        imn_closed_form(&base)
    } else {
        let inner = |rho: f64| {
            let r2 = rho * rho;
            let p = ImnParams { c: (c * c + r2).sqrt(), d: (d * d + r2).sqrt(), ..base };
            let w = if k == 2 { 1.0 } else { std::f64::consts::PI * rho.abs() };
            w * imn_closed_form(&p)
        };
        let scale = imn_closed_form(&base);
        let feats = [0.0, c, -c, d, -d, tn, -tn, 10.0 * c.max(d), -10.0 * c.max(d)];
        let opts = QuadOptions { rel_tol: 1e-10, ..QuadOptions::default() };
        match integrate_real_line(|r| inner(r) / scale, &feats, opts) {
            Ok(e) => e.value * scale,
            Err(QuadError::NotConverged { estimate, error }) => {
                return Err(ImnError::Accuracy { estimate: estimate * scale, error: error * scale })
            }
            Err(QuadError::NonFinite(x)) => {
                return Err(ImnError::InvalidParams(format!("integrand not finite at {x}")))
            }
        }
    };
    let tt = tn * tn + c * c + d * d;
    let (m, n, k) = (m as i32, n as i32, k as i32);
    let rhs = 1.0 / (tt.powi(n) * c.powi(2 * m - k)) + 1.0 / (tt.powi(m) * d.powi(2 * n - k));
    Ok(ConvCheck { k: k as usize, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_values() {
        let p = ImnParams::new(1, 1, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!((upper_bound(&p, BoundVariant::Simple, false) - 1.0).abs() < 1e-15);
        assert!((grafakos_bound(&p) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn k1_is_the_integral() {
        let cc = conv_bound_check(1, 2, 3, 0.5, 1.5, &[-2.0]).unwrap();
        let p = ImnParams::new(2, 3, 1.0, 2.0, 0.5, 1.5).unwrap();
        assert_eq!(cc.lhs, imn_closed_form(&p));
        assert!((cc.rhs - upper_bound(&p, BoundVariant::Simple, false)).abs() < 1e-12 * cc.rhs);
    }

    #[test]
    fn k2_gaussian_like_value() {
        // m = n = 1, t = 0, c = d: ∫ (|x|² + c²)^{-2} dx over the plane is π / c²
        let cc = conv_bound_check(2, 1, 1, 0.7, 0.7, &[0.0, 0.0]).unwrap();
        assert!((cc.lhs - std::f64::consts::PI / 0.49).abs() < 1e-8 * cc.lhs);
        let cc = conv_bound_check(3, 2, 2, 1.0, 1.0, &[0.0, 0.0, 0.0]).unwrap();
        // ∫_{R³} (|x|² + 1)^{-4} dx = 4π ∫ r²/(r²+1)^4 dr = 4π · π/32
        let expect = std::f64::consts::PI.powi(2) / 8.0;
        assert!((cc.lhs - expect).abs() < 1e-8 * expect, "{} vs {expect}", cc.lhs);
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(conv_bound_check(4, 2, 2, 1.0, 1.0, &[0.0; 4]), Err(ImnError::UnsupportedDimension(4))));
        assert!(conv_bound_check(3, 1, 2, 1.0, 1.0, &[0.0; 3]).is_err());
    }
}
