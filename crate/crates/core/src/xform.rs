//! Analysis and synthesis between grid functions and frame coefficients.
//!
//! For window `(j, ℓ)` with lattice `x_k = U(σ ∘ k)`:
//!
//! ```text
//! c_k = α (2L)^{-2} Σ_m ψ̂(ξ_m) f̂(ξ_m) e^{2πi ξ_m·x_k},    α = √(σ₁σ₂) 2^{-j/2}
//! ```
//!
//! The phase factorizes as `e^{2πi η₁ k₁} e^{2πi η₂ k₂}` with `η = σ ∘ U^T ξ`,
//! so each block is one complex matrix product over the window support.
//! Synthesis is the exact grid adjoint.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::frame::{FrameError, WeightRule, Window, WindowBank};
use crate::geometry::FrameIndex;
use crate::grid::{FftPlan, GridFunction, GridSpec, Spectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum XformError {
    #[error("function grid {0:?} does not match bank grid {1:?}")]
    Mismatch(GridSpec, GridSpec),
    #[error("coefficient layout does not match the bank")]
    Layout,
    #[error("input has zero norm; ratio undefined")]
    ZeroNorm,
    #[error("index {0:?} is not in the coefficient set")]
    Index(FrameIndex),
    #[error(transparent)]
    Frame(#[from] FrameError),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients of one window, stored row by row in `k₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBlock {
    pub j: u32,
    pub l: u32,
    /// `(k₁, first k₂, count)`.
    pub rows: Vec<(i64, i64, usize)>,
    pub values: Vec<Complex64>,
}

impl CoefficientBlock {
    fn zeros(w: &Window, l_box: f64) -> Self {
        let rows: Vec<_> = w.k_rows(l_box).into_iter().map(|(k1, lo, hi)| (k1, lo, (hi - lo + 1) as usize)).collect();
        let n = rows.iter().map(|r| r.2).sum();
        CoefficientBlock { j: w.j, l: w.l, rows, values: vec![ZERO; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = FrameIndex> + '_ {
        self.rows
            .iter()
            .flat_map(move |&(k1, k2, n)| (0..n as i64).map(move |d| FrameIndex { j: self.j, l: self.l, k: [k1, k2 + d] }))
    }

    /// Bounding rectangle `(k1_min, k2_min, rows, cols)`.
    fn bounds(&self) -> (i64, i64, usize, usize) {
        if self.rows.is_empty() {
            return (0, 0, 0, 0);
        }
        let k1a = self.rows[0].0;
        let k1b = self.rows[self.rows.len() - 1].0;
        let k2a = self.rows.iter().map(|r| r.1).min().unwrap_or(0);
        let k2b = self.rows.iter().map(|r| r.1 + r.2 as i64 - 1).max().unwrap_or(0);
        (k1a, k2a, (k1b - k1a + 1) as usize, (k2b - k2a + 1) as usize)
    }

    fn position(&self, k: [i64; 2]) -> Option<usize> {
        let first = self.rows.first()?.0;
        let r = usize::try_from(k[0] - first).ok()?;
        let &(k1, k2, n) = self.rows.get(r)?;
        debug_assert_eq!(k1, k[0]);
        let d = usize::try_from(k[1] - k2).ok()?;
        if d >= n {
            return None;
        }
        Some(self.rows[..r].iter().map(|x| x.2).sum::<usize>() + d)
    }
}

/// Frame coefficients, one block per window in bank order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub grid: GridSpec,
    pub j_max: u32,
    pub blocks: Vec<CoefficientBlock>,
}

impl CoefficientSet {
    /// All-zero coefficients on the bank's lattices.
    pub fn zeros(bank: &WindowBank) -> Self {
        let blocks = bank.windows().iter().map(|w| CoefficientBlock::zeros(w, bank.grid.l)).collect();
        CoefficientSet { grid: bank.grid, j_max: bank.spec.j_max, blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (FrameIndex, Complex64)> + '_ {
        self.blocks.iter().flat_map(|b| b.indices().zip(b.values.iter().copied()))
    }

    pub fn values_mut(&mut self) -> impl Iterator<Item = &mut Complex64> {
        self.blocks.iter_mut().flat_map(|b| b.values.iter_mut())
    }

    fn block_of(&self, j: u32, l: u32) -> Option<&CoefficientBlock> {
        self.blocks.iter().find(|b| b.j == j && b.l == l)
    }

    pub fn get(&self, idx: &FrameIndex) -> Option<Complex64> {
        let b = self.block_of(idx.j, idx.l)?;
        b.position(idx.k).map(|p| b.values[p])
    }

    pub fn set(&mut self, idx: &FrameIndex, v: Complex64) -> Result<(), XformError> {
        let b = self.blocks.iter_mut().find(|b| b.j == idx.j && b.l == idx.l).ok_or(XformError::Index(*idx))?;
        let p = b.position(idx.k).ok_or(XformError::Index(*idx))?;
        b.values[p] = v;
        Ok(())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.iter().map(|(_, v)| v.norm_sqr()).sum()
    }

    /// `Σ a_λ conj(b_λ)`.
    pub fn inner(&self, o: &CoefficientSet) -> Result<Complex64, XformError> {
        self.same_layout(o)?;
        Ok(self
            .blocks
            .iter()
            .zip(&o.blocks)
            .flat_map(|(a, b)| a.values.iter().zip(&b.values))
            .map(|(x, y)| x * y.conj())
            .sum())
    }

    pub fn same_layout(&self, o: &CoefficientSet) -> Result<(), XformError> {
        let ok = self.grid == o.grid
            && self.blocks.len() == o.blocks.len()
            && self.blocks.iter().zip(&o.blocks).all(|(a, b)| a.j == b.j && a.l == b.l && a.rows == b.rows);
        if ok {
            Ok(())
        } else {
            Err(XformError::Layout)
        }
    }

    /// Overwrite the blocks of `other` that are nonzero into `self`;
    /// the blocks must be disjoint.
    pub fn merge(&mut self, other: &CoefficientSet) -> Result<(), XformError> {
        self.same_layout(other)?;
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            let a_zero = a.values.iter().all(|v| *v == ZERO);
            let b_zero = b.values.iter().all(|v| *v == ZERO);
            if !a_zero && !b_zero {
                return Err(XformError::Layout);
            }
            if a_zero {
                a.values.clone_from(&b.values);
            }
        }
        Ok(())
    }

    /// Entries sorted by `|c|` descending, ties by index.
    pub fn sorted(&self) -> Vec<(FrameIndex, Complex64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()).then(a.0.cmp(&b.0)));
        v
    }
}

fn check_grid(bank: &WindowBank, spec: GridSpec) -> Result<(), XformError> {
    if bank.grid != spec {
        return Err(XformError::Mismatch(spec, bank.grid));
    }
    Ok(())
}

fn cis(t: f64) -> Complex64 {
    let (s, c) = t.sin_cos();
    Complex64::new(c, s)
}

/// Fill `out[r]` with `e^{2πi sign η (k0 + r)}` by a recurrence that is
/// resynchronized every 32 steps.
fn phase_run(eta: f64, sign: f64, k0: i64, out: &mut [Complex64]) {
    let step = cis(sign * 2.0 * PI * eta);
    let mut cur = ZERO;
    for (r, o) in out.iter_mut().enumerate() {
        if r % 32 == 0 {
            cur = cis(sign * 2.0 * PI * (eta * (k0 + r as i64) as f64).rem_euclid(1.0));
        } else {
            cur *= step;
        }
        *o = cur;
    }
}

/// `C ← A B` for row-major complex matrices.
fn gemm(m: usize, k: usize, n: usize, a: &[Complex64], b: &[Complex64], c: &mut [Complex64]) {
    assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: Complex64 is repr(C) {re, im}, layout-identical to [f64; 2];
    // the slices cover the strided extents checked above.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            n as isize,
            1,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
}

fn analyze_block(w: &Window, spec: &Spectrum, l_box: f64) -> CoefficientBlock {
    let mut block = CoefficientBlock::zeros(w, l_box);
    let (k1a, k2a, nk1, nk2) = block.bounds();
    let m = w.support.len();
    if m == 0 || block.is_empty() {
        return block;
    }
    let grid = spec.spec;
    let etas: Vec<[f64; 2]> = w.support.iter().map(|&p| w.eta(grid.xi(p as usize))).collect();
    let mut p1 = vec![ZERO; nk1 * m];
    let mut e2 = vec![ZERO; m * nk2];
    let mut run1 = vec![ZERO; nk1];
    for (col, ((eta, &p), &psi)) in etas.iter().zip(&w.support).zip(&w.values).enumerate() {
        phase_run(eta[0], 1.0, k1a, &mut run1);
        for (r, v) in run1.iter().enumerate() {
            p1[r * m + col] = *v;
        }
        let g = spec.values[p as usize] * psi;
        let row = &mut e2[col * nk2..(col + 1) * nk2];
        phase_run(eta[1], 1.0, k2a, row);
        row.iter_mut().for_each(|v| *v *= g);
    }
    let mut full = vec![ZERO; nk1 * nk2];
    gemm(nk1, m, nk2, &p1, &e2, &mut full);
    let scale = w.alpha() * (2.0 * grid.l).powi(-2);
    let mut out = block.values.iter_mut();
    for (r, &(_, k2, n)) in block.rows.iter().enumerate() {
        let start = r * nk2 + (k2 - k2a) as usize;
        for v in &full[start..start + n] {
            *out.next().expect("layout") = v * scale;
        }
    }
    block
}

/// Exact coefficients via one matrix product per window (parallel over windows).
pub fn analyze(f: &GridFunction, bank: &WindowBank) -> Result<CoefficientSet, XformError> {
    check_grid(bank, f.spec)?;
    let spec = f.fourier(&FftPlan::new(f.spec.n));
    analyze_spectrum(&spec, bank)
}

pub fn analyze_spectrum(spec: &Spectrum, bank: &WindowBank) -> Result<CoefficientSet, XformError> {
    check_grid(bank, spec.spec)?;
    let blocks = bank.windows().par_iter().map(|w| analyze_block(w, spec, bank.grid.l)).collect();
    Ok(CoefficientSet { grid: bank.grid, j_max: bank.spec.j_max, blocks })
}

/// Slow oracle: every coefficient as an explicit frequency sum with phases
/// `e^{2πi ξ·x_k}` computed from the lattice point itself.
pub fn analyze_direct(f: &GridFunction, bank: &WindowBank) -> Result<CoefficientSet, XformError> {
    check_grid(bank, f.spec)?;
    let spec = f.fourier(&FftPlan::new(f.spec.n));
    let grid = bank.grid;
    let mut out = CoefficientSet::zeros(bank);
    for (w, block) in bank.windows().iter().zip(out.blocks.iter_mut()) {
        let scale = w.alpha() * (2.0 * grid.l).powi(-2);
        let idx: Vec<_> = block.indices().collect();
        for (v, lam) in block.values.iter_mut().zip(idx) {
            let x = w.lattice_point(lam.k);
            let mut acc = ZERO;
            for (&p, &psi) in w.support.iter().zip(&w.values) {
                let xi = grid.xi(p as usize);
                acc += spec.values[p as usize] * psi * cis(2.0 * PI * (xi[0] * x[0] + xi[1] * x[1]));
            }
            *v = acc * scale;
        }
    }
    Ok(out)
}

fn synthesize_block(w: &Window, block: &CoefficientBlock, grid: GridSpec) -> Vec<Complex64> {
    let m = w.support.len();
    let (k1a, k2a, nk1, nk2) = block.bounds();
    if m == 0 || block.is_empty() {
        return vec![ZERO; m];
    }
    let mut cmat = vec![ZERO; nk1 * nk2];
    let mut vals = block.values.iter();
    for (r, &(_, k2, n)) in block.rows.iter().enumerate() {
        let start = r * nk2 + (k2 - k2a) as usize;
        for slot in &mut cmat[start..start + n] {
            *slot = *vals.next().expect("layout");
        }
    }
    let etas: Vec<[f64; 2]> = w.support.iter().map(|&p| w.eta(grid.xi(p as usize))).collect();
    // B[c, m] = e^{-2πi η₂ k₂}
    let mut b = vec![ZERO; nk2 * m];
    let mut run = vec![ZERO; nk2.max(nk1)];
    for (col, eta) in etas.iter().enumerate() {
        phase_run(eta[1], -1.0, k2a, &mut run[..nk2]);
        for (c, v) in run[..nk2].iter().enumerate() {
            b[c * m + col] = *v;
        }
    }
    let mut t = vec![ZERO; nk1 * m];
    gemm(nk1, nk2, m, &cmat, &b, &mut t);
    let alpha = w.alpha();
    etas.iter()
        .zip(&w.values)
        .enumerate()
        .map(|(col, (eta, &psi))| {
            phase_run(eta[0], -1.0, k1a, &mut run[..nk1]);
            let s: Complex64 = run[..nk1].iter().enumerate().map(|(r, ph)| ph * t[r * m + col]).sum();
            s * alpha * psi
        })
        .collect()
}

/// Spectrum of the synthesized function.
pub fn synthesize_spectrum(c: &CoefficientSet, bank: &WindowBank) -> Result<Spectrum, XformError> {
    check_grid(bank, c.grid)?;
    if c.blocks.len() != bank.windows().len() {
        return Err(XformError::Layout);
    }
    let parts: Vec<Vec<Complex64>> =
        bank.windows().par_iter().zip(c.blocks.par_iter()).map(|(w, b)| synthesize_block(w, b, bank.grid)).collect();
    let mut spec = Spectrum::zeros(bank.grid);
    for (w, part) in bank.windows().iter().zip(parts) {
        for (&p, v) in w.support.iter().zip(part) {
            spec.values[p as usize] += v;
        }
    }
    Ok(spec)
}

/// Exact adjoint of [`analyze`].
pub fn synthesize(c: &CoefficientSet, bank: &WindowBank) -> Result<GridFunction, XformError> {
    Ok(synthesize_spectrum(c, bank)?.inverse(&FftPlan::new(bank.grid.n)))
}

/// Add the spectrum of one atom `c φ_λ` to `spec`.
pub fn accumulate_atom(spec: &mut Spectrum, bank: &WindowBank, lam: &FrameIndex, c: Complex64) -> Result<(), XformError> {
    let w = bank.window(lam.j, lam.l).ok_or(XformError::Index(*lam))?;
    let a = c * w.alpha();
    for (&p, &psi) in w.support.iter().zip(&w.values) {
        let eta = w.eta(bank.grid.xi(p as usize));
        let t = (eta[0] * lam.k[0] as f64 + eta[1] * lam.k[1] as f64).rem_euclid(1.0);
        spec.values[p as usize] += a * psi * cis(-2.0 * PI * t);
    }
    Ok(())
}

/// `|Σ|c_λ|² / ‖f‖² - 1|`.
pub fn parseval_defect(f: &GridFunction, bank: &WindowBank) -> Result<f64, XformError> {
    let nf = f.l2_norm().powi(2);
    if nf == 0.0 {
        return Err(XformError::ZeroNorm);
    }
    Ok((analyze(f, bank)?.norm_sqr() / nf - 1.0).abs())
}

/// `‖(w_λ c_λ)‖_ℓ²`.
pub fn hs_norm_via_weights(c: &CoefficientSet, rule: &WeightRule) -> f64 {
    c.blocks
        .iter()
        .map(|b| rule.weight(b.j, b.l).powi(2) * b.values.iter().map(|v| v.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}
