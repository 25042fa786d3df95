//! Truncated power series in one and two variables over a field.
//!
//! Coefficients are generic so the same code runs on `f64` and on exact
//! `BigRational`.  All products are truncated at the order the series was
//! created with.

use std::ops::Neg;

use num_traits::Num;

/// Field-like coefficient type.
pub trait Coeff: Clone + Num + Neg<Output = Self> {
    fn from_i64(v: i64) -> Self;
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Coeff for num_rational::BigRational {
    fn from_i64(v: i64) -> Self {
        num_rational::BigRational::from_integer(v.into())
    }
}

/// Univariate series `sum_{k <= order} a_k x^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Series<T> {
    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![T::zero(); order + 1] }
    }

    /// Builds a series from leading coefficients, padding or truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<T>, order: usize) -> Self {
        coeffs.resize(order + 1, T::zero());
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Series { coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Series { coeffs }
    }

    pub fn scale(&self, s: &T) -> Self {
        Series { coeffs: self.coeffs.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![T::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Option<Self> {
        let a0 = self.coeffs[0].clone();
        if a0.is_zero() {
            return None;
        }
        let n = self.coeffs.len();
        let mut out: Vec<T> = Vec::with_capacity(n);
        out.push(T::one() / a0.clone());
        for k in 1..n {
            let mut acc = T::zero();
            for i in 1..=k {
                acc = acc + self.coeffs[i].clone() * out[k - i].clone();
            }
            out.push(-(acc / a0.clone()));
        }
        Some(Series { coeffs: out })
    }

    /// Square root by Newton iteration `y <- (y + s / y) / 2`, doubling the
    /// number of correct terms per step.  Requires the constant term to be 1.
    pub fn sqrt_newton(&self) -> Option<Self> {
        if self.coeffs[0] != T::one() {
            return None;
        }
        let order = self.order();
        let half = T::one() / T::from_i64(2);
        let mut y = Series::from_coeffs(vec![T::one()], order);
        let mut correct = 1usize;
        while correct <= order {
            let q = self.mul(&y.inv()?);
            y = y.add(&q).scale(&half);
            correct *= 2;
        }
        Some(y)
    }
}

/// Bivariate series `sum a_{p,q} y^p z^q` truncated at `p <= P`, `q <= Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries<T> {
    p: usize,
    q: usize,
    coeffs: Vec<T>,
}

impl<T: Coeff> BiSeries<T> {
    pub fn zero(p: usize, q: usize) -> Self {
        BiSeries { p, q, coeffs: vec![T::zero(); (p + 1) * (q + 1)] }
    }

    pub fn constant(v: T, p: usize, q: usize) -> Self {
        let mut s = Self::zero(p, q);
        s.coeffs[0] = v;
        s
    }

    /// Lifts a univariate series in `y` (or `z` when `in_z`).
    pub fn from_univariate(s: &Series<T>, in_z: bool, p: usize, q: usize) -> Self {
        let mut out = Self::zero(p, q);
        let lim = if in_z { q } else { p };
        for k in 0..=lim.min(s.order()) {
            let idx = if in_z { out.idx(0, k) } else { out.idx(k, 0) };
            out.coeffs[idx] = s.coeff(k).clone();
        }
        out
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.q + 1) + j
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.coeffs[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.idx(i, j);
        self.coeffs[k] = v;
    }

    pub fn add(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        BiSeries { p: self.p, q: self.q, coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        BiSeries { p: self.p, q: self.q, coeffs }
    }

    pub fn scale(&self, s: &T) -> Self {
        BiSeries { p: self.p, q: self.q, coeffs: self.coeffs.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.p, self.q);
        for i1 in 0..=self.p {
            for j1 in 0..=self.q {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=(self.p - i1) {
                    for j2 in 0..=(self.q - j1) {
                        let b = o.get(i2, j2);
                        if b.is_zero() {
                            continue;
                        }
                        let k = out.idx(i1 + i2, j1 + j2);
                        out.coeffs[k] = out.coeffs[k].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    /// Quotient `self / den`; `den` needs a nonzero constant term.
    pub fn div(&self, den: &Self) -> Option<Self> {
        let d0 = den.get(0, 0).clone();
        if d0.is_zero() {
            return None;
        }
        let mut out = Self::zero(self.p, self.q);
        for i in 0..=self.p {
            for j in 0..=self.q {
                let mut acc = self.get(i, j).clone();
                for i2 in 0..=i {
                    for j2 in 0..=j {
                        if i2 == 0 && j2 == 0 {
                            continue;
                        }
                        let d = den.get(i2, j2);
                        if d.is_zero() {
                            continue;
                        }
                        acc = acc - d.clone() * out.get(i - i2, j - j2).clone();
                    }
                }
                out.set(i, j, acc / d0.clone());
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sqrt_of_one_minus_x_matches_binomial_series() {
        let s = Series::from_coeffs(vec![q(1, 1), q(-1, 1)], 8);
        let r = s.sqrt_newton().unwrap();
        let expected = [q(1, 1), q(-1, 2), q(-1, 8), q(-1, 16), q(-5, 128), q(-7, 256)];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(r.coeff(k), e);
        }
        assert_eq!(r.mul(&r), s);
    }

    #[test]
    fn geometric_inverse() {
        let s = Series::from_coeffs(vec![1.0, -1.0], 6);
        let inv = s.inv().unwrap();
        assert!(inv.coeffs().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn bivariate_division_roundtrip() {
        let mut d = BiSeries::<BigRational>::zero(4, 3);
        d.set(0, 0, q(3, 1));
        d.set(1, 0, q(-1, 2));
        d.set(0, 1, q(2, 5));
        d.set(1, 1, q(7, 1));
        let mut n = BiSeries::<BigRational>::zero(4, 3);
        n.set(0, 0, q(1, 1));
        n.set(2, 1, q(-4, 3));
        let r = n.div(&d).unwrap();
        assert_eq!(r.mul(&d), n);
    }
}
