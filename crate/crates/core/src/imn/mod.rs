//! The integral
//!
//! ```text
//! I_{m,n} = ∫ (a²(x-b)² + c²)^{-m} (x² + d²)^{-n} dx
//! ```
//!
//! with three independent evaluation paths (closed form over an exact
//! coefficient table, a bivariate generating series, adaptive quadrature),
//! the partial-fraction recursions of its integrand, two-term upper bounds
//! and the special values used along the way.

mod bounds;
mod cmn;
mod exact;
mod integral;
mod pfd;

use thiserror::Error;

pub use bounds::{conv_bound_check, grafakos_bound, upper_bound, BoundVariant, ConvCheck};
pub use cmn::{
    cmn_coefficient, cmn_coefficient_long, cmn_table, cmn_table_f64, positivity_scan,
    satisfies_nonvanishing_conditions, CmnTable, PositivityReport,
};
pub use exact::{
    bell_polynomial, bell_sqrt, bell_sqrt_f64, binom, binom_real, factorial, gamma_half,
    single_factor_coefficient, single_factor_integral, ExactScalar, HalfSign,
};
pub use integral::{imn_closed_form, imn_generating_series, imn_quadrature};
pub use pfd::{
    pfd_genfunc_check, pfd_residual, pfd_residual_f64, pfd_tables, two_term_genfunc, PfdCoeffTable, PfdParams,
    TwoTermGenfunc,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImnError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("quadrature accuracy not reached (best estimate {estimate:e}, error {error:e})")]
    Accuracy { estimate: f64, error: f64 },
    #[error("unsupported dimension {0} (only 1, 2, 3)")]
    UnsupportedDimension(usize),
}

/// Parameters `(m, n, a, b, c, d)` of `I_{m,n}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ImnParams {
    pub m: u32,
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ImnParams {
    pub fn new(m: u32, n: u32, a: f64, b: f64, c: f64, d: f64) -> Result<Self, ImnError> {
        let p = ImnParams { m, n, a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ImnError> {
        if self.m == 0 || self.n == 0 {
            return Err(ImnError::InvalidParams("m and n must be positive".into()));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(ImnError::InvalidParams(format!("a = {} must be finite and >= 0", self.a)));
        }
        if !self.b.is_finite() {
            return Err(ImnError::InvalidParams("b must be finite".into()));
        }
        if !(self.c > 0.0 && self.c.is_finite() && self.d > 0.0 && self.d.is_finite()) {
            return Err(ImnError::InvalidParams("c and d must be finite and positive".into()));
        }
        Ok(())
    }

    /// `δ₊ = (c + ad)² + a²b²`.
    pub fn delta_plus(&self) -> f64 {
        let s = self.c + self.a * self.d;
        s * s + (self.a * self.b).powi(2)
    }

    /// The integrand at `x`.
    pub fn integrand(&self, x: f64) -> f64 {
        let u = self.a * (x - self.b);
        let f1 = u * u + self.c * self.c;
        let f2 = x * x + self.d * self.d;
        f1.powi(-(self.m as i32)) * f2.powi(-(self.n as i32))
    }
}
