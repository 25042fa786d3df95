//! Numerical core of ridgelab.
//!
//! The crate is organised by topic:
//!
//! - [`geometry`]: directions, rotations, anisotropic index maps and the
//!   angle/space localisation sets.
//! - [`grid`]: periodic sample grids and the discrete Fourier convention.
//! - [`frame`]: the frequency window bank and the transport weight.
//! - [`xform`]: ridgelet analysis, synthesis and norm diagnostics.
//! - [`advection`]: mutilated functions and the explicit advection-reaction
//!   solution operator.
//! - [`imn`]: the two-factor rational integral `I_{m,n}`, its closed form,
//!   coefficient tables, partial fractions and bounds.
//! - [`seqspace`]: rearrangements, Lorentz norms and N-term curves.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature shared by the oracles.

// `!(x <= bound)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod advection;
pub mod frame;
pub mod geometry;
pub mod grid;
pub mod imn;
pub mod quad;
pub mod seqspace;
pub mod series;
pub mod xform;

pub use num_complex::Complex64;
