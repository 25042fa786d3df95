//! Exact rational scalars, binomials and the closed-form special values.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ImnError;

/// Arbitrary-precision rational value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn from_int(v: i64) -> Self {
        ExactScalar(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        ExactScalar(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar(r)
    }

    /// Exact value of a finite float (every float is a dyadic rational).
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(ExactScalar)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! exact_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: ExactScalar) -> ExactScalar {
                ExactScalar(self.0.$m(o.0))
            }
        }
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, o: &'a ExactScalar) -> ExactScalar {
                ExactScalar((&self.0).$m(&o.0))
            }
        }
    };
}
exact_binop!(Add, add);
exact_binop!(Sub, sub);
exact_binop!(Mul, mul);
exact_binop!(Div, div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Integer binomial `C(n, k)`; zero for `k < 0` or `0 <= n < k`, and the
/// generalized value `(-1)^k C(k - n - 1, k)` for negative `n`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if n < 0 {
        let v = binom(k - n - 1, k);
        return if k % 2 == 0 { v } else { -v };
    }
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized binomial `α(α-1)…(α-n+1)/n!` for rational `α`.
pub fn binom_real(alpha: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for i in 0..n {
        acc = acc * (alpha - rat(i as i64)) / rat(i as i64 + 1);
    }
    acc
}

/// Which half-integer argument: `1/2 + m` or `1/2 - m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSign {
    Plus,
    Minus,
}

/// `Γ(1/2 ± m)` as an exact multiple of `√π`; the returned scalar is that
/// multiple.
pub fn gamma_half(m: u32, sign: HalfSign) -> ExactScalar {
    let two_m = factorial(2 * m);
    let m_fact = factorial(m);
    let four_m = BigInt::from(4).pow(m);
    match sign {
        HalfSign::Plus => ExactScalar(BigRational::new(two_m, four_m * m_fact)),
        HalfSign::Minus => {
            let num = if m % 2 == 0 { four_m } else { -four_m } * m_fact;
            ExactScalar(BigRational::new(num, two_m))
        }
    }
}

fn check_bell_range(n: u32, k: u32) -> Result<(), ImnError> {
    if k < 1 || k > n {
        return Err(ImnError::IndexOutOfRange(format!("bell_sqrt needs 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

/// `B_{n,k}` of the derivatives of `√(c² - y)` at `y = 0`, in closed form:
/// `(-2c)^{k-2n} (2n-k-1)! / ((k-1)! (n-k)!)`.
pub fn bell_sqrt(n: u32, k: u32, c: &BigRational) -> Result<ExactScalar, ImnError> {
    check_bell_range(n, k)?;
    if c.is_zero() {
        return Err(ImnError::InvalidParams("c must be nonzero".into()));
    }
    let base = -(c * rat(2));
    let e = k as i32 - 2 * n as i32;
    let pow = num_traits::pow(base.recip(), (-e) as usize);
    let num = factorial(2 * n - k - 1);
    let den = factorial(k - 1) * factorial(n - k);
    Ok(ExactScalar(pow * BigRational::new(num, den)))
}

/// Floating-point evaluation of [`bell_sqrt`].
pub fn bell_sqrt_f64(n: u32, k: u32, c: f64) -> Result<f64, ImnError> {
    check_bell_range(n, k)?;
    let ratio = BigRational::new(factorial(2 * n - k - 1), factorial(k - 1) * factorial(n - k));
    Ok((-2.0 * c).powi(k as i32 - 2 * n as i32) * ratio.to_f64().unwrap_or(f64::NAN))
}

/// Partial Bell polynomial `B_{n,k}(y_1, …, y_{n-k+1})` via the recurrence
/// `B_{n,k} = Σ_i C(n-1, i-1) y_i B_{n-i,k-1}`.
pub fn bell_polynomial(n: usize, k: usize, ys: &[BigRational]) -> BigRational {
    // table[n][k]
    let mut t = vec![vec![BigRational::zero(); k + 1]; n + 1];
    t[0][0] = BigRational::one();
    for nn in 1..=n {
        for kk in 1..=k.min(nn) {
            let mut acc = BigRational::zero();
            for i in 1..=(nn - kk + 1) {
                if i > ys.len() {
                    break;
                }
                let b = binom(nn as i64 - 1, i as i64 - 1);
                acc += BigRational::from_integer(b) * &ys[i - 1] * &t[nn - i][kk - 1];
            }
            t[nn][kk] = acc;
        }
    }
    t[n][k].clone()
}

/// `C(2(m-1), m-1) / 4^{m-1}`, the rational part of the one-factor integral.
pub fn single_factor_coefficient(m: u32) -> ExactScalar {
    let k = m.saturating_sub(1);
    ExactScalar(BigRational::new(binom(2 * k as i64, k as i64), BigInt::from(4).pow(k)))
}

/// `∫ (a²(x-b)² + c²)^{-m} dx = π / (a c^{2m-1}) · C(2(m-1), m-1) / 4^{m-1}`.
pub fn single_factor_integral(m: u32, a: f64, c: f64) -> Result<f64, ImnError> {
    if m == 0 {
        return Err(ImnError::InvalidParams("m must be positive".into()));
    }
    if a == 0.0 {
        return Err(ImnError::Divergent("a = 0 leaves a constant integrand".into()));
    }
    if !(a > 0.0 && c > 0.0) {
        return Err(ImnError::InvalidParams("a and c must be positive".into()));
    }
    Ok(std::f64::consts::PI / (a * c.powi(2 * m as i32 - 1)) * single_factor_coefficient(m).to_f64())
}
