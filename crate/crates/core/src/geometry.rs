//! Positions, arc angles and shapes on the unit sphere.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{mat_vec, norm, Mat3, Vec3};

/// Tolerance used for triangle realizability checks.
pub const REALIZABILITY_TOL: f64 = 1e-12;

/// Unordered body pairs in cyclic order: (1,2), (2,3), (3,1), zero-based.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Point on the unit sphere in spherical coordinates.
///
/// `theta` is the polar angle, normally in `[0, π]`. On a rotating meridian the
/// range is widened to `[-π, π]` with `phi = 0`; negative `theta` then means the
/// half-meridian opposite the `phi` direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyPosition {
    pub theta: f64,
    pub phi: f64,
}

impl BodyPosition {
    pub const fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// A body on the meridian `phi = 0`, `theta` in `[-π, π]`.
    pub const fn meridian(theta: f64) -> Self {
        Self { theta, phi: 0.0 }
    }

    /// Cartesian embedding `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn embed(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Inverse of [`embed`](Self::embed); returns `theta` in `[0, π]`.
    pub fn from_cartesian(v: &Vec3) -> Self {
        let r = norm(v);
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Self { theta, phi }
    }

    pub fn rotated(&self, rotation: &Mat3) -> Self {
        Self::from_cartesian(&mat_vec(rotation, &self.embed()))
    }
}

/// Free-function form of [`BodyPosition::embed`].
pub fn embed(p: &BodyPosition) -> Vec3 {
    p.embed()
}

/// Cosine of the arc angle between two positions, clamped to `[-1, 1]`.
pub fn cos_arc(p: &BodyPosition, q: &BodyPosition) -> f64 {
    let c = p.theta.cos() * q.theta.cos() + p.theta.sin() * q.theta.sin() * (p.phi - q.phi).cos();
    c.clamp(-1.0, 1.0)
}

/// Arc angle σ ∈ [0, π] between two positions.
pub fn arc_angle(p: &BodyPosition, q: &BodyPosition) -> f64 {
    cos_arc(p, q).acos()
}

/// Euclidean chord between two points of the unit sphere.
pub fn chord(p: &BodyPosition, q: &BodyPosition) -> f64 {
    norm(&crate::linalg::sub(&p.embed(), &q.embed()))
}

/// Three bodies.
pub type Config = [BodyPosition; 3];

/// Rotation-invariant triangle described by its three arc angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shape3 {
    pub sigma12: f64,
    pub sigma23: f64,
    pub sigma31: f64,
}

impl Shape3 {
    /// Validates each side lies in `(0, π)` and the triangle is realizable.
    pub fn new(sigma12: f64, sigma23: f64, sigma31: f64) -> Result<Self> {
        let shape = Self { sigma12, sigma23, sigma31 };
        shape.check_realizable()?;
        Ok(shape)
    }

    /// Builds a shape without checking realizability.
    pub const fn new_unchecked(sigma12: f64, sigma23: f64, sigma31: f64) -> Self {
        Self { sigma12, sigma23, sigma31 }
    }

    pub fn equilateral(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma, sigma)
    }

    /// Sides in cyclic pair order `[σ12, σ23, σ31]`.
    pub fn sides(&self) -> [f64; 3] {
        [self.sigma12, self.sigma23, self.sigma31]
    }

    pub fn cosines(&self) -> [f64; 3] {
        self.sides().map(f64::cos)
    }

    /// Chord lengths, `2 sin(σ/2)`.
    pub fn chords(&self) -> [f64; 3] {
        self.sides().map(|s| 2.0 * (0.5 * s).sin())
    }

    /// Arc angle between bodies `i` and `j` (zero-based, `i != j`).
    pub fn side(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.sigma12,
            (1, 2) => self.sigma23,
            (0, 2) => self.sigma31,
            _ => panic!("invalid pair ({i},{j})"),
        }
    }

    /// Side opposite body `k`.
    pub fn opposite(&self, k: usize) -> f64 {
        match k {
            0 => self.sigma23,
            1 => self.sigma31,
            2 => self.sigma12,
            _ => panic!("invalid body {k}"),
        }
    }

    /// Smallest slack among the realizability inequalities (negative when violated).
    pub fn realizability_margin(&self) -> f64 {
        let [a, b, c] = self.sides();
        let side_bounds = [a, b, c, PI - a, PI - b, PI - c];
        let triangle = [b + c - a, c + a - b, a + b - c, 2.0 * PI - (a + b + c)];
        side_bounds
            .into_iter()
            .chain(triangle)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_realizable(&self) -> Result<()> {
        let [a, b, c] = self.sides();
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidInput("non-finite arc angle".into()));
        }
        for (k, s) in self.sides().into_iter().enumerate() {
            if s <= 0.0 || s >= PI {
                let (i, j) = PAIRS[k];
                return Err(Error::DegenerateShape(i, j));
            }
        }
        let tol = REALIZABILITY_TOL;
        if a > b + c + tol || b > c + a + tol || c > a + b + tol {
            return Err(Error::UnrealizableShape(format!(
                "triangle inequality violated by ({a}, {b}, {c})"
            )));
        }
        if a + b + c > 2.0 * PI + tol {
            return Err(Error::UnrealizableShape(format!(
                "perimeter {} exceeds 2π",
                a + b + c
            )));
        }
        Ok(())
    }

    pub fn is_equilateral(&self, tol: f64) -> bool {
        let [a, b, c] = self.sides();
        (a - b).abs() <= tol && (b - c).abs() <= tol && (c - a).abs() <= tol
    }

    pub fn is_isosceles(&self, tol: f64) -> bool {
        let [a, b, c] = self.sides();
        (a - b).abs() <= tol || (b - c).abs() <= tol || (c - a).abs() <= tol
    }
}

/// The three pairwise arc angles of a configuration.
pub fn shape_of(config: &Config) -> Result<Shape3> {
    let mut sides = [0.0; 3];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let c = cos_arc(&config[i], &config[j]);
        if c.abs() >= 1.0 {
            return Err(Error::DegenerateShape(i, j));
        }
        sides[k] = c.acos();
    }
    Ok(Shape3::new_unchecked(sides[0], sides[1], sides[2]))
}

/// Collinear shape on a rotating meridian: `a = θ2 − θ1`, `x = θ3 − θ1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeridianShape3 {
    pub a: f64,
    pub x: f64,
}

impl MeridianShape3 {
    /// Checks `0 < a < π` and `-π < x < π`.
    pub fn new(a: f64, x: f64) -> Result<Self> {
        if !(a > 0.0 && a < PI) {
            return Err(Error::InvalidInput(format!("meridian shape needs 0 < a < π, got {a}")));
        }
        if !(x > -PI && x < PI) {
            return Err(Error::InvalidInput(format!("meridian shape needs -π < x < π, got {x}")));
        }
        Ok(Self { a, x })
    }

    pub const fn new_unchecked(a: f64, x: f64) -> Self {
        Self { a, x }
    }

    /// Shape of three meridian angles; wraps into the canonical `(a, x)` window
    /// using the reflection `θ → −θ` when needed.
    pub fn from_thetas(thetas: &[f64; 3]) -> Result<Self> {
        let a = wrap_pi(thetas[1] - thetas[0]);
        let x = wrap_pi(thetas[2] - thetas[0]);
        if a < 0.0 {
            Self::new(-a, wrap_pi(-x))
        } else {
            Self::new(a, x)
        }
    }

    /// `y = x − a/2`, the horizontal coordinate of the zero-set plot.
    pub fn y(&self) -> f64 {
        self.x - 0.5 * self.a
    }

    pub fn from_a_y(a: f64, y: f64) -> Self {
        Self { a, x: y + 0.5 * a }
    }

    /// Offsets of each body from body 1: `(0, a, x)`.
    pub fn offsets(&self) -> [f64; 3] {
        [0.0, self.a, self.x]
    }

    /// Signed differences `θ_ij = θ_i − θ_j` in pair order (12, 23, 31).
    pub fn theta_diffs(&self) -> [f64; 3] {
        [-self.a, self.a - self.x, self.x]
    }

    /// `θ_i − θ_j` for zero-based `i`, `j`.
    pub fn theta_diff(&self, i: usize, j: usize) -> f64 {
        let o = self.offsets();
        o[i] - o[j]
    }

    /// The arc-angle shape of the same three points.
    pub fn to_shape3(&self) -> Shape3 {
        let d = self.theta_diffs().map(|t| t.cos().clamp(-1.0, 1.0).acos());
        Shape3::new_unchecked(d[0], d[1], d[2])
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_pi(angle: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = angle.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    r
}
