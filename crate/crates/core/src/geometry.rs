//! Directions, rotations, anisotropic lattice maps and the index sets that
//! describe where ridgelet coefficients concentrate.
//!
//! Everything is planar.  Direction `ℓ` at scale `j` is
//! `s_{j,ℓ} = (cos θ, sin θ)` with `θ = 2πℓ / L_j`, `L_j = 2^{j+1}`.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unsupported dimension {0} (only d = 2)")]
    UnsupportedDimension(usize),
    #[error("direction has norm {0}, expected 1")]
    InvalidDirection(f64),
    #[error("shell index r = {r} outside 1..={j}")]
    InvalidShell { j: u32, r: u32 },
}

pub type Point = [f64; 2];

/// Unit vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Direction([f64; 2]);

impl Direction {
    pub fn new(x: f64, y: f64) -> Result<Self, GeometryError> {
        let n = x.hypot(y);
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(GeometryError::InvalidDirection(n));
        }
        Ok(Direction([x, y]))
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(x: f64, y: f64) -> Result<Self, GeometryError> {
        let n = x.hypot(y);
        if !(n > 0.0 && n.is_finite()) {
            return Err(GeometryError::InvalidDirection(n));
        }
        Ok(Direction([x / n, y / n]))
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Direction([c, s])
    }

    pub fn e1() -> Self {
        Direction([1.0, 0.0])
    }

    pub fn components(&self) -> [f64; 2] {
        self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    /// Signed angle from `e₁` in `(-π, π]`.
    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    pub fn dot(&self, p: &Point) -> f64 {
        self.0[0] * p[0] + self.0[1] * p[1]
    }

    /// `|sin|` of the angle between the two directions.
    pub fn abs_sin_to(&self, o: &Direction) -> f64 {
        (self.0[0] * o.0[1] - self.0[1] * o.0[0]).abs()
    }

    pub fn flipped(&self) -> Self {
        Direction([-self.0[0], -self.0[1]])
    }
}

impl TryFrom<[f64; 2]> for Direction {
    type Error = GeometryError;
    fn try_from(v: [f64; 2]) -> Result<Self, GeometryError> {
        Direction::new(v[0], v[1])
    }
}

impl From<Direction> for [f64; 2] {
    fn from(d: Direction) -> [f64; 2] {
        d.0
    }
}

/// `(j, ℓ, k)`; the derived order is the lexicographic tie-break used for
/// rearrangements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct FrameIndex {
    pub j: u32,
    pub l: u32,
    pub k: [i64; 2],
}

/// `L_j`; scale 0 of a bank is the single low-pass window and does not use this.
pub fn num_directions(j: u32) -> usize {
    1usize << (j + 1)
}

pub fn direction_angle(j: u32, l: u32) -> f64 {
    2.0 * PI * l as f64 / num_directions(j) as f64
}

pub fn direction(j: u32, l: u32) -> Direction {
    Direction::from_angle(direction_angle(j, l))
}

/// The `2^{j+1}` equispaced directions of scale `j`.
pub fn sphere_sampling(j: u32, d: usize) -> Result<Vec<Direction>, GeometryError> {
    if d != 2 {
        return Err(GeometryError::UnsupportedDimension(d));
    }
    Ok((0..num_directions(j) as u32).map(|l| direction(j, l)).collect())
}

/// Rotation with `R s = e₁` (the planar rotation by `-θ(s)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationToE1 {
    m: [[f64; 2]; 2],
}

impl RotationToE1 {
    pub fn identity() -> Self {
        RotationToE1 { m: [[1.0, 0.0], [0.0, 1.0]] }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn apply(&self, p: Point) -> Point {
        [self.m[0][0] * p[0] + self.m[0][1] * p[1], self.m[1][0] * p[0] + self.m[1][1] * p[1]]
    }

    /// `R⁻¹ = Rᵀ`.
    pub fn apply_inv(&self, p: Point) -> Point {
        [self.m[0][0] * p[0] + self.m[1][0] * p[1], self.m[0][1] * p[0] + self.m[1][1] * p[1]]
    }
}

pub fn rotation_to_e1(s: &Direction) -> RotationToE1 {
    let [c, sn] = s.components();
    RotationToE1 { m: [[c, sn], [-sn, c]] }
}

/// `U_{j,ℓ} = R⁻¹_{j,ℓ} D_{2^{-j}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropicMap {
    pub j: u32,
    pub rotation: RotationToE1,
}

impl AnisotropicMap {
    pub fn new(j: u32, s: &Direction) -> Self {
        AnisotropicMap { j, rotation: rotation_to_e1(s) }
    }

    pub fn for_index(j: u32, l: u32) -> Self {
        Self::new(j, &direction(j, l))
    }

    fn dil(&self) -> f64 {
        (-(self.j as f64)).exp2()
    }

    pub fn apply_u(&self, k: Point) -> Point {
        self.rotation.apply_inv([k[0] * self.dil(), k[1]])
    }

    pub fn apply_u_inv(&self, x: Point) -> Point {
        let r = self.rotation.apply(x);
        [r[0] / self.dil(), r[1]]
    }
}

/// Directions `ℓ` of scale `j` whose angle to `n` falls into shell `r`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AngleShell {
    pub j: u32,
    pub r: u32,
    pub members: Vec<u32>,
}

/// Shell index of a value `|sin θ|` at scale `j`: `r < j` holds
/// `2^{-r} <= |sin θ| < 2^{-r+1}` (with `|sin θ| = 1` in shell 1), shell `j`
/// holds everything below `2^{-j+1}`.  Lower bounds are closed so the
/// shells partition.
pub fn shell_of(j: u32, abs_sin: f64) -> u32 {
    for r in 1..j {
        if abs_sin >= (-(r as f64)).exp2() {
            return r;
        }
    }
    j.max(1)
}

pub fn angle_shell(j: u32, r: u32, n: &Direction, directions: &[Direction]) -> Result<AngleShell, GeometryError> {
    if r < 1 || r > j {
        return Err(GeometryError::InvalidShell { j, r });
    }
    let members = directions
        .iter()
        .enumerate()
        .filter(|(_, s)| shell_of(j, s.abs_sin_to(n)) == r)
        .map(|(l, _)| l as u32)
        .collect();
    Ok(AngleShell { j, r, members })
}

/// Quantities of the space localisation of coefficients near the
/// hyperplane `x·n = v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocSpaceFrame {
    pub j: u32,
    pub l: u32,
    pub a: f64,
    pub phi: f64,
    pub v_mat: [[f64; 2]; 2],
    pub normal: Direction,
    pub offset: f64,
    /// `v U⁻¹ n`.
    shift: Point,
}

impl LocSpaceFrame {
    pub fn t(&self, k: [i64; 2]) -> Point {
        self.t_at([k[0] as f64, k[1] as f64])
    }

    /// `t` for a non-integer lattice coordinate, e.g. an oversampled `σ∘k`.
    pub fn t_at(&self, k: Point) -> Point {
        [k[0] - self.shift[0], k[1] - self.shift[1]]
    }

    /// `(ρ₁, ρ₂) = V t`.
    pub fn rho(&self, t: Point) -> Point {
        let m = &self.v_mat;
        [m[0][0] * t[0] + m[0][1] * t[1], m[1][0] * t[0] + m[1][1] * t[1]]
    }

    pub fn det_v(&self) -> f64 {
        self.v_mat[0][0] * self.v_mat[1][1] - self.v_mat[0][1] * self.v_mat[1][0]
    }

    /// Tail set membership `|V t(k)| > (2^{j+1}|sin φ|)^{δ/2} + √2/2`.
    pub fn in_tail(&self, k: [i64; 2], delta: f64) -> bool {
        self.in_tail_at(self.t(k), delta)
    }

    pub fn in_tail_at(&self, t: Point, delta: f64) -> bool {
        let r = self.rho(t);
        let lhs = r[0].hypot(r[1]);
        let base = (self.j as f64 + 1.0).exp2() * self.phi.sin().abs();
        lhs > base.powf(delta / 2.0) + 2f64.sqrt() / 2.0
    }
}

pub fn loc_space_frame(j: u32, l: u32, n: &Direction, v: f64) -> LocSpaceFrame {
    let phi = direction_angle(j, l) - n.angle();
    let (s, c) = phi.sin_cos();
    let tj = (j as f64).exp2();
    let a = (tj * tj * s * s + c * c).sqrt();
    let v_mat = [[c / a, -tj * s / a], [tj * s / (a * a), c / (a * a)]];
    let u_inv_n = AnisotropicMap::for_index(j, l).apply_u_inv(n.components());
    LocSpaceFrame { j, l, a, phi, v_mat, normal: *n, offset: v, shift: [v * u_inv_n[0], v * u_inv_n[1]] }
}

pub fn tail_membership(frame: &LocSpaceFrame, k: [i64; 2], delta: f64) -> bool {
    frame.in_tail(k, delta)
}
