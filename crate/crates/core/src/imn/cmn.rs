//! Coefficients `c^{m,n}_{i,j}` of the closed form of `I_{m,n}`.
//!
//! Two independent representations are implemented: a double sum over
//! `(r, s)` with half-integer binomials, and the long seven-fold sum that
//! comes from differentiating the generating function directly.  Both are
//! evaluated in exact rational arithmetic.  The values are rationals with
//! power-of-two denominators, not integers in general (for example
//! `c^{1,2}_{3,0} = 1/2`).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::exact::{binom, binom_real, ExactScalar};

/// Top index `2(m+n) - 3` of the table.
fn top(m: u32, n: u32) -> i64 {
    2 * (m as i64 + n as i64) - 3
}

/// The three conditions outside of which a coefficient must vanish.
pub fn satisfies_nonvanishing_conditions(m: u32, n: u32, i: u32, j: u32) -> bool {
    let s = i as i64 + j as i64;
    s % 2 == 1 && s <= top(m, n) && (i >= 2 * m - 1 || j >= 2 * n - 1)
}

fn half_minus(r: i64) -> BigRational {
    BigRational::new(BigInt::from(r - 1), BigInt::from(2))
}

/// `c^{m,n}_{i,j}` by the `(r, s)` double sum.  Entries failing the parity
/// or degree condition are returned as zero without evaluating the sum; the
/// third (threshold) condition is left to the sum itself.
pub fn cmn_coefficient(m: u32, n: u32, i: u32, j: u32) -> ExactScalar {
    assert!(m >= 1 && n >= 1, "m, n must be positive");
    let (i, j) = (i as i64, j as i64);
    if (i + j) % 2 == 0 || i + j > top(m, n) {
        return ExactScalar::zero();
    }
    let mn1 = m as i64 + n as i64 - 1;
    let br: Vec<BigRational> = (0..=i).map(|r| binom_real(&half_minus(r), m - 1)).collect();
    let bs: Vec<BigRational> = (0..=j).map(|s| binom_real(&half_minus(s), n - 1)).collect();
    let mut acc = BigRational::zero();
    for r in 0..=i {
        if br[r as usize].is_zero() {
            continue;
        }
        for s in 0..=j {
            if (r + s) % 2 == 0 || bs[s as usize].is_zero() {
                continue;
            }
            let rest = i + j - r - s;
            let b1 = binom(mn1, mn1 - rest / 2);
            if b1.is_zero() {
                continue;
            }
            let b2 = binom(rest, i - r);
            if b2.is_zero() {
                continue;
            }
            let sign_exp = m as i64 + n as i64 + (r + s - 1) / 2;
            let mut term = BigRational::from_integer(binom(r + s, s) * b1 * b2) * &br[r as usize] * &bs[s as usize];
            if sign_exp % 2 != 0 {
                term = -term;
            }
            acc += term;
        }
    }
    ExactScalar::from_rational(acc)
}

/// Weight of the `k`-th Bell term for `m - 1` derivatives; for `m = 1` the
/// only term is `k = 0` with weight one.
fn derivative_weight(k: i64, m: u32) -> BigRational {
    if m == 1 {
        return if k == 0 { BigRational::one() } else { BigRational::zero() };
    }
    let m = m as i64;
    let b = binom(2 * m - k - 3, m - k - 1);
    BigRational::new(BigInt::from(2).pow(k as u32) * BigInt::from(k) * b, BigInt::from(m - 1))
}

fn derivative_range(m: u32) -> std::ops::RangeInclusive<i64> {
    if m == 1 {
        0..=0
    } else {
        1..=(m as i64 - 1)
    }
}

/// `c^{m,n}_{i,j}` by the seven-fold `(k, ℓ, p, q, r, s, t)` sum.
///
/// The sum is the real part of an expansion in powers of `c`, `ad` and
/// `i·ab`; the two remaining binomial indices `g = j - p - s` and
/// `h = i - q - r - t` come from expanding the conjugate denominator power.
pub fn cmn_coefficient_long(m: u32, n: u32, i: u32, j: u32) -> ExactScalar {
    assert!(m >= 1 && n >= 1, "m, n must be positive");
    let (i, j) = (i as i64, j as i64);
    let e = top(m, n) - i - j;
    if e < 0 || e % 2 != 0 {
        // odd power of i·ab is purely imaginary; negative powers never occur
        return ExactScalar::zero();
    }
    let mn = m as i64 + n as i64;
    let mut acc = BigRational::zero();
    for k in derivative_range(m) {
        let wk = derivative_weight(k, m);
        for l in derivative_range(n) {
            let wl = derivative_weight(l, n);
            let w = &wk * &wl;
            for p in 0..=l {
                let bp = binom(l + 1, p);
                for q in 0..=k.min(l - p) {
                    let bq = binom(l - p, q);
                    for r in 0..=(k - q) {
                        let br = binom(l + r, r);
                        let smax = mn - 2 - l - r;
                        for s in 0..=smax {
                            let g = j - p - s;
                            if g < 0 {
                                break;
                            }
                            let bs = binom(smax, s);
                            let tmax = mn - 2 - p - q - r - s;
                            for t in 0..=tmax {
                                let h = i - q - r - t;
                                if h < 0 {
                                    break;
                                }
                                let bg = binom(mn - 1, g);
                                let bh = binom(mn - 1 - g, h);
                                if bg.is_zero() || bh.is_zero() {
                                    continue;
                                }
                                let bt = binom(tmax, t);
                                // (-1)^q from the expansion, (-1)^{mn-1-g-h} from (c+ad-i·ab)^{mn-1},
                                // i^e = (-1)^{e/2}
                                let sign = q + (mn - 1 - g - h) + e / 2;
                                let mag = &bp * &bq * &br * bs.clone() * bt * bg * bh;
                                let mut term = BigRational::from_integer(mag) * &w;
                                if sign % 2 != 0 {
                                    term = -term;
                                }
                                acc += term;
                            }
                        }
                    }
                }
            }
        }
    }
    let scale = BigInt::from(4).pow((mn - 2) as u32);
    ExactScalar::from_rational(acc / BigRational::from_integer(scale))
}

/// Exact table `c^{m,n}_{i,j}`, `0 <= i, j <= 2(m+n) - 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct CmnTable {
    m: u32,
    n: u32,
    size: usize,
    values: Vec<ExactScalar>,
}

impl CmnTable {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of indices per axis, `2(m+n) - 2`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.values[i * self.size + j]
    }

    /// `(i, j, value)` for all nonzero entries.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, &ExactScalar)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(idx, v)| (idx / self.size, idx % self.size, v))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.to_f64()).collect()
    }
}

pub fn cmn_table(m: u32, n: u32) -> CmnTable {
    let size = (top(m, n) + 1) as usize;
    let mut values = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            values.push(cmn_coefficient(m, n, i as u32, j as u32));
        }
    }
    CmnTable { m, n, size, values }
}

type F64Cache = Mutex<HashMap<(u32, u32), Arc<Vec<f64>>>>;

/// Cached floating-point copy of [`cmn_table`] (row-major, `size × size`).
pub fn cmn_table_f64(m: u32, n: u32) -> Arc<Vec<f64>> {
    static CACHE: OnceLock<F64Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cmn cache poisoned").get(&(m, n)) {
        return Arc::clone(t);
    }
    let t = Arc::new(cmn_table(m, n).to_f64());
    cache.lock().expect("cmn cache poisoned").insert((m, n), Arc::clone(&t));
    t
}

/// Outcome of scanning the coefficient tables for negative entries.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PositivityReport {
    pub m_max: u32,
    pub n_max: u32,
    /// `(m, n, i, j, value)` of every negative entry.
    pub negatives: Vec<(u32, u32, usize, usize, f64)>,
    pub nonzero: usize,
    /// Entries allowed to be nonzero by the three vanishing conditions.
    pub predicted_nonzero: usize,
    /// Nonzero entries violating the conditions (should be none).
    pub pattern_violations: usize,
    /// Min and max of the nonzero values.
    pub min_value: f64,
    pub max_value: f64,
}

pub fn positivity_scan(m_max: u32, n_max: u32) -> PositivityReport {
    let mut rep = PositivityReport {
        m_max,
        n_max,
        negatives: Vec::new(),
        nonzero: 0,
        predicted_nonzero: 0,
        pattern_violations: 0,
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
    };
    for m in 1..=m_max {
        for n in 1..=n_max {
            let t = cmn_table(m, n);
            for i in 0..t.size() {
                for j in 0..t.size() {
                    let allowed = satisfies_nonvanishing_conditions(m, n, i as u32, j as u32);
                    rep.predicted_nonzero += allowed as usize;
                    let v = t.get(i, j);
                    if v.is_zero() {
                        continue;
                    }
                    rep.nonzero += 1;
                    if !allowed {
                        rep.pattern_violations += 1;
                    }
                    let f = v.to_f64();
                    rep.min_value = rep.min_value.min(f);
                    rep.max_value = rep.max_value.max(f);
                    if v.as_rational().is_negative() {
                        rep.negatives.push((m, n, i, j, v.as_rational().to_f64().unwrap_or(f64::NAN)));
                    }
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case() {
        assert_eq!(cmn_coefficient(1, 1, 1, 0), ExactScalar::from_int(1));
        assert_eq!(cmn_coefficient(1, 1, 0, 1), ExactScalar::from_int(1));
        assert_eq!(cmn_coefficient_long(1, 1, 1, 0), ExactScalar::from_int(1));
        assert_eq!(cmn_coefficient(2, 2, 0, 0), ExactScalar::zero());
    }

    #[test]
    fn non_integer_entry() {
        assert_eq!(cmn_coefficient(1, 2, 3, 0), ExactScalar::ratio(1, 2));
        assert_eq!(cmn_coefficient(1, 2, 1, 0), ExactScalar::ratio(1, 2));
    }

    #[test]
    fn long_form_agrees_small() {
        for m in 1..=3 {
            for n in 1..=3 {
                for i in 0..=(2 * (m + n) - 1) {
                    for j in 0..=(2 * (m + n) - 1) {
                        assert_eq!(
                            cmn_coefficient(m, n, i, j),
                            cmn_coefficient_long(m, n, i, j),
                            "m={m} n={n} i={i} j={j}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn scan_small() {
        let rep = positivity_scan(2, 2);
        assert!(rep.negatives.is_empty());
        assert_eq!(rep.pattern_violations, 0);
        let t11 = cmn_table(1, 1);
        let nz: Vec<_> = t11.nonzero().map(|(i, j, v)| (i, j, v.clone())).collect();
        assert_eq!(nz, vec![(0, 1, ExactScalar::from_int(1)), (1, 0, ExactScalar::from_int(1))]);
    }
}
