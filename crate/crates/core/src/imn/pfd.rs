//! Partial fraction decomposition of the `I_{m,n}` integrand.
//!
//! ```text
//! P_{m,n}(x) = Σ_k a^{2n} / Δ^{n+k-1} · (r^n_k + a²b x s^n_k) / (a²(x-b)² + c²)^{m-k+1}
//!            + Σ_ℓ a^{2(ℓ-1)} / Δ^{m+ℓ-1} · (t^ℓ_m + a²b x u^ℓ_m) / (x² + d²)^{n-ℓ+1}
//! ```
//!
//! with `Δ = δ₊δ₋`.  Tables are generic over the scalar so they can be built
//! exactly (rationals) or in floating point.

use num_rational::BigRational;
use num_traits::Zero;

use super::ImnParams;
use crate::series::{BiSeries, Coeff, Series};

/// `(a, b, c, d)` in a chosen scalar type.
#[derive(Debug, Clone, PartialEq)]
pub struct PfdParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl PfdParams<f64> {
    pub fn from_imn(p: &ImnParams) -> Self {
        PfdParams { a: p.a, b: p.b, c: p.c, d: p.d }
    }
}

/// Recursion tables `r^ℓ_k`, `t^ℓ_k`, `u^ℓ_k` for `0 <= k <= m`, `1 <= ℓ <= n`
/// and the derived constants.  `s^ℓ_k = -u^ℓ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PfdCoeffTable<T> {
    pub m: usize,
    pub n: usize,
    r: Vec<Vec<T>>,
    t: Vec<Vec<T>>,
    u: Vec<Vec<T>>,
    pub delta: T,
    pub delta_plus: T,
    pub delta_minus: T,
    /// `q = a²b² + a²d² - c²`.
    pub q: T,
    pub r11: T,
    pub t11: T,
}

impl<T: Coeff> PfdCoeffTable<T> {
    /// `r^ℓ_k`, `ℓ >= 1`.
    pub fn r(&self, l: usize, k: usize) -> &T {
        &self.r[l - 1][k]
    }
    pub fn t(&self, l: usize, k: usize) -> &T {
        &self.t[l - 1][k]
    }
    pub fn u(&self, l: usize, k: usize) -> &T {
        &self.u[l - 1][k]
    }
    pub fn s(&self, l: usize, k: usize) -> T {
        -self.u[l - 1][k].clone()
    }
}

fn sq<T: Coeff>(x: &T) -> T {
    x.clone() * x.clone()
}

/// Builds the tables up to `k <= m`, `ℓ <= n`.  The `ℓ = 1` row comes from
/// the two-term recursion in `k` started at `r¹₀ = -1, t¹₀ = 1, u¹₀ = 0`;
/// higher rows are convolutions against the first row.
pub fn pfd_tables<T: Coeff>(m: usize, n: usize, p: &PfdParams<T>) -> PfdCoeffTable<T> {
    let m = m.max(1);
    let n = n.max(1);
    let a2 = sq(&p.a);
    let a2b2 = a2.clone() * sq(&p.b);
    let a2d2 = a2.clone() * sq(&p.d);
    let c2 = sq(&p.c);
    let ad = p.a.clone() * p.d.clone();
    let ab2 = a2b2.clone();
    let dp = sq(&(p.c.clone() + ad.clone())) + ab2.clone();
    let dm = sq(&(p.c.clone() - ad)) + ab2;
    let delta = dp.clone() * dm.clone();
    let two = T::from_i64(2);
    let r11 = T::from_i64(3) * a2b2.clone() + a2d2.clone() - c2.clone();
    let t11 = a2b2.clone() - a2d2.clone() + c2.clone();
    let u11 = two.clone();
    let a4b2d2 = a2b2.clone() * a2d2.clone();
    let ab_sum = a2b2.clone() * (a2b2.clone() + c2.clone());

    let mut r1 = vec![T::from_i64(-1), r11.clone()];
    let mut t1 = vec![T::one(), t11.clone()];
    let mut u1 = vec![T::zero(), u11.clone()];
    for k in 2..=m {
        r1.push(r11.clone() * t1[k - 1].clone() + ab_sum.clone() * u11.clone() * u1[k - 1].clone());
        t1.push(t11.clone() * t1[k - 1].clone() - a4b2d2.clone() * u11.clone() * u1[k - 1].clone());
        u1.push(u11.clone() * t1[k - 1].clone() + t11.clone() * u1[k - 1].clone());
    }
    let mut r = vec![r1];
    let mut t = vec![t1];
    let mut u = vec![u1];
    for l in 2..=n {
        let (rp, up) = (&r[l - 2], &u[l - 2]);
        let (r1, t1, u1) = (&r[0], &t[0], &u[0]);
        let mut rl = vec![T::zero(); m + 1];
        let mut tl = vec![T::zero(); m + 1];
        let mut ul = vec![T::zero(); m + 1];
        for k in 1..=m {
            let mut ra = T::zero();
            let mut ta = T::zero();
            let mut ua = T::zero();
            for kp in 1..=k {
                let i1 = k - kp + 1;
                let i0 = k - kp;
                ra = ra
                    + r1[i1].clone() * rp[kp].clone()
                    + a2b2.clone()
                        * (delta.clone() * u1[i0].clone() - (a2b2.clone() + c2.clone()) * u1[i1].clone())
                        * up[kp].clone();
                ta = ta + t1[i1].clone() * rp[kp].clone() + a4b2d2.clone() * u1[i1].clone() * up[kp].clone();
                ua = ua + u1[i1].clone() * rp[kp].clone() - t1[i1].clone() * up[kp].clone();
            }
            rl[k] = ra;
            tl[k] = ta;
            ul[k] = ua;
        }
        r.push(rl);
        t.push(tl);
        u.push(ul);
    }
    let q = a2b2 + a2d2 - c2;
    PfdCoeffTable { m, n, r, t, u, delta, delta_plus: dp, delta_minus: dm, q, r11, t11 }
}

fn powi<T: Coeff>(x: &T, e: usize) -> T {
    num_traits::pow(x.clone(), e)
}

/// The integrand and its reassembled decomposition at `x`.
fn pfd_pair<T: Coeff>(m: usize, n: usize, p: &PfdParams<T>, x: &T) -> (T, T) {
    let tab = pfd_tables(m, n, p);
    let a2 = p.a.clone() * p.a.clone();
    let xb = x.clone() - p.b.clone();
    let f1 = a2.clone() * xb.clone() * xb + p.c.clone() * p.c.clone();
    let f2 = x.clone() * x.clone() + p.d.clone() * p.d.clone();
    let direct = T::one() / (powi(&f1, m) * powi(&f2, n));
    let a2bx = a2.clone() * p.b.clone() * x.clone();
    let mut sum = T::zero();
    for k in 1..=m {
        let num = tab.r(n, k).clone() + a2bx.clone() * tab.s(n, k);
        sum = sum + powi(&a2, n) * num / (powi(&tab.delta, n + k - 1) * powi(&f1, m - k + 1));
    }
    for l in 1..=n {
        let num = tab.t(l, m).clone() + a2bx.clone() * tab.u(l, m).clone();
        sum = sum + powi(&a2, l - 1) * num / (powi(&tab.delta, m + l - 1) * powi(&f2, n - l + 1));
    }
    (direct, sum)
}

/// Relative residual `|P_{m,n}(x) - PFD(x)| / |P_{m,n}(x)|`.
///
/// The inputs are exact dyadic rationals, and the decomposition is
/// reassembled in rational arithmetic: in floating point the partial
/// fractions cancel heavily away from the peaks.  A correct table gives
/// exactly zero.
pub fn pfd_residual(m: usize, n: usize, p: &ImnParams, x: f64) -> f64 {
    let ex = |v: f64| BigRational::from_float(v).expect("finite input");
    let pe = PfdParams { a: ex(p.a), b: ex(p.b), c: ex(p.c), d: ex(p.d) };
    let (direct, sum) = pfd_pair(m.max(1), n.max(1), &pe, &ex(x));
    let r = (direct.clone() - sum) / direct;
    num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN).abs()
}

/// Floating-point version of [`pfd_residual`]; loses accuracy where the
/// partial fractions cancel.
pub fn pfd_residual_f64(m: usize, n: usize, p: &ImnParams, x: f64) -> f64 {
    let (direct, sum) = pfd_pair(m.max(1), n.max(1), &PfdParams::from_imn(p), &x);
    ((direct - sum) / direct).abs()
}

/// Generating function of a two-term recursion `(g_k, h_k) = M (g_{k-1}, h_{k-1})`
/// started at index `i`: `G = y^i N_G(y) / D(y)`, `H = y^i N_H(y) / D(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTermGenfunc<T> {
    pub shift: usize,
    /// Linear numerators `[constant, y-coefficient]`.
    pub num_g: [T; 2],
    pub num_h: [T; 2],
    /// Quadratic denominator `[1, -tr M, det M]`.
    pub den: [T; 3],
}

impl<T: Coeff> TwoTermGenfunc<T> {
    /// Taylor coefficients of `(G, H)` up to `y^order`.
    pub fn expand(&self, order: usize) -> (Vec<T>, Vec<T>) {
        let den = Series::from_coeffs(self.den.to_vec(), order).inv().expect("denominator has constant term 1");
        let g = Series::from_coeffs(self.num_g.to_vec(), order).mul(&den);
        let h = Series::from_coeffs(self.num_h.to_vec(), order).mul(&den);
        let shift = |s: &Series<T>| {
            let mut v = vec![T::zero(); order + 1];
            for k in self.shift..=order {
                v[k] = s.coeff(k - self.shift).clone();
            }
            v
        };
        (shift(&g), shift(&h))
    }
}

pub fn two_term_genfunc<T: Coeff>(mat: [[T; 2]; 2], g_i: T, h_i: T, i: usize) -> TwoTermGenfunc<T> {
    let [[m11, m12], [m21, m22]] = mat;
    let det = m11.clone() * m22.clone() - m12.clone() * m21.clone();
    let tr = m11.clone() + m22.clone();
    TwoTermGenfunc {
        shift: i,
        num_g: [g_i.clone(), m12 * h_i.clone() - m22 * g_i.clone()],
        num_h: [h_i.clone(), m21 * g_i - m11 * h_i],
        den: [T::one(), -tr, det],
    }
}

/// Expands `R`, `T`, `U` (the generating functions of the three tables in
/// `y ↔ k`, `z ↔ ℓ`) to bidegree `order` in exact arithmetic and returns the
/// number of coefficients that differ from the recursion tables (zero means
/// an exact match).
pub fn pfd_genfunc_check(order: usize, p: &PfdParams<BigRational>) -> usize {
    let tab = pfd_tables(order, order, p);
    let zero = BiSeries::<BigRational>::zero(order, order);
    let mut den = zero.clone();
    // D = Δ(y - z)² - 2 t¹₁ y - 2 q z + 1
    let two = BigRational::from_i64(2);
    den.set(0, 0, BigRational::from_i64(1));
    if order >= 1 {
        den.set(1, 0, -(two.clone() * tab.t11.clone()));
        den.set(0, 1, -(two.clone() * tab.q.clone()));
    }
    if order >= 2 {
        den.set(2, 0, tab.delta.clone());
        den.set(0, 2, tab.delta.clone());
    }
    if order >= 1 {
        den.set(1, 1, -(two.clone() * tab.delta.clone()));
    }
    // numerators: y z (±Δ(y - z) + const)
    let numer = |sign: i64, constant: BigRational| {
        let mut s = zero.clone();
        if order >= 1 {
            s.set(1, 1, constant);
        }
        if order >= 2 && sign != 0 {
            let sd = BigRational::from_i64(sign) * tab.delta.clone();
            s.set(2, 1, sd.clone());
            s.set(1, 2, -sd);
        }
        s
    };
    let rs = numer(1, tab.r11.clone()).div(&den).expect("D(0,0) = 1");
    let ts = numer(-1, tab.t11.clone()).div(&den).expect("D(0,0) = 1");
    let us = numer(0, two).div(&den).expect("D(0,0) = 1");
    let mut mismatches = 0;
    for k in 1..=order {
        for l in 1..=order {
            mismatches += (rs.get(k, l) != tab.r(l, k)) as usize;
            mismatches += (ts.get(k, l) != tab.t(l, k)) as usize;
            mismatches += (us.get(k, l) != tab.u(l, k)) as usize;
        }
    }
    // the constant and pure-y / pure-z parts of the series must vanish
    for k in 0..=order {
        mismatches += (!rs.get(k, 0).is_zero() || !rs.get(0, k).is_zero()) as usize;
    }
    mismatches
}
