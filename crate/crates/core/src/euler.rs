//! Collinear (Eulerian) relative equilibria on a rotating meridian.
//!
//! Bodies sit on the meridian `φ = ωt` with signed polar angles `θ_k ∈ [-π, π]`.
//! The shape is given by the differences `θ_ij`. For a non-degenerate
//! discriminant `D = A²`, the condition `Σ m_k sin 2θ_k = 0` pins the overall
//! placement up to a branch sign `s = ±1`, and a shape is an equilibrium iff a
//! 2×2 determinant built from
//! `F_ij = m_i m_j sin θ_ij U′(cos θ_ij)` and `G_ij = m_i m_j sin 2θ_ij`
//! vanishes. The sign of the common ratio `(F_ij − F_jk)/(G_ij − G_jk)` then
//! picks `s` and gives `ω² = 2A |ratio|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::dynamics::{meridian_re_residual, meridian_residual_scale};
use crate::error::{Error, Result};
use crate::geometry::{wrap_pi, MeridianShape3, PAIRS};
use crate::linalg::{cross, dot};
use crate::masses::Masses;
use crate::potential::{with_pair, PotentialKind};
use crate::roots::bisect;

/// `A` below this multiple of the total mass counts as degenerate.
pub const DEGENERATE_A_TOL: f64 = 1e-10;
/// `|det|` below this multiple of `max|ΔG| · max|ΔF|` counts as zero.
pub const DET_ZERO_TOL: f64 = 1e-10;
/// Allowed mismatch between the three compact equations once `ω²` is fixed.
pub const RATIO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeridianDiagnostics {
    pub d: f64,
    /// `√D`, present when `D ≥ 0`.
    pub a: Option<f64>,
    /// Branch sign, once the equations of motion have fixed it.
    pub s: Option<i8>,
    pub omega2: Option<f64>,
}

/// `F_ij` and `G_ij` in pair order (12, 23, 31).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FgPair {
    pub f: [f64; 3],
    pub g: [f64; 3],
}

impl FgPair {
    /// `(F12 − F23, F23 − F31, F31 − F12)`.
    pub fn f_diffs(&self) -> [f64; 3] {
        cyclic_diffs(&self.f)
    }

    pub fn g_diffs(&self) -> [f64; 3] {
        cyclic_diffs(&self.g)
    }

    /// `(G12 − G23)(F31 − F12) − (G31 − G12)(F12 − F23)`.
    pub fn det(&self) -> f64 {
        let [f12, f23, f31] = self.f;
        let [g12, g23, g31] = self.g;
        (g12 - g23) * (f31 - f12) - (g31 - g12) * (f12 - f23)
    }

    /// Scale for judging `det` against zero.
    pub fn det_scale(&self) -> f64 {
        max_abs(&self.g_diffs()) * max_abs(&self.f_diffs())
    }
}

fn cyclic_diffs(v: &[f64; 3]) -> [f64; 3] {
    [v[0] - v[1], v[1] - v[2], v[2] - v[0]]
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Discriminant `D = Σ m² + 2 Σ m_i m_j cos 2θ_ij`.
pub fn discriminant(shape: &MeridianShape3, masses: &Masses) -> Result<MeridianDiagnostics> {
    let m = masses.values();
    let d2 = shape.theta_diffs();
    let mut d: f64 = m.iter().map(|x| x * x).sum();
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        d += 2.0 * m[i] * m[j] * (2.0 * d2[k]).cos();
    }
    let scale = masses.total().powi(2);
    if d < -1e-12 * scale {
        return Err(Error::Internal(format!("negative discriminant {d}")));
    }
    let d = d.max(0.0);
    Ok(MeridianDiagnostics { d, a: Some(d.sqrt()), s: None, omega2: None })
}

fn discriminant_a(shape: &MeridianShape3, masses: &Masses) -> Result<f64> {
    Ok(discriminant(shape, masses)?.a.unwrap_or(0.0))
}

/// A degenerate (`D = 0`) shape permitted by the masses, as `(a, x)` plus the
/// raw differences `(θ12, θ13)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateShape {
    pub theta12: f64,
    pub theta13: f64,
    pub a: f64,
    pub x: f64,
    /// Two bodies coincide or are antipodal.
    pub collision: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateConstraintReport {
    /// The masses satisfy `m_k ≤ m_i + m_j` for every `k`.
    pub attainable: bool,
    /// Some inequality holds with equality.
    pub boundary: bool,
    pub solutions: Vec<DegenerateShape>,
}

/// Solves `m1 + m2 e^{2iθ12} + m3 e^{2iθ13} = 0` for the shapes with `D = 0`.
pub fn degenerate_shape_constraints(masses: &Masses) -> DegenerateConstraintReport {
    let [m1, m2, m3] = masses.values();
    let tol = 1e-12 * masses.total();
    let slack = [m2 + m3 - m1, m3 + m1 - m2, m1 + m2 - m3];
    let attainable = slack.iter().all(|s| *s >= -tol);
    let boundary = attainable && slack.iter().any(|s| s.abs() <= tol);
    let mut solutions = Vec::new();
    if attainable {
        let cos_alpha = ((m3 * m3 - m1 * m1 - m2 * m2) / (2.0 * m1 * m2)).clamp(-1.0, 1.0);
        let alpha0 = cos_alpha.acos();
        for alpha in [alpha0, -alpha0] {
            // m3 e^{iβ} = −(m1 + m2 e^{iα})
            let re = -(m1 + m2 * alpha.cos());
            let im = -(m2 * alpha.sin());
            let beta = im.atan2(re);
            for t12 in half_angles(alpha) {
                for t13 in half_angles(beta) {
                    let (a, x) = (-t12, -t13);
                    let (a, x) = if a < 0.0 { (-a, -x) } else { (a, x) };
                    let (a, x) = (wrap_pi(a), wrap_pi(x));
                    if !(a > 0.0 && a < PI) || x <= -PI || x >= PI {
                        continue;
                    }
                    let diffs = [t12, t13, t13 - t12];
                    let collision = diffs.iter().any(|d| d.sin().abs() < 1e-9);
                    let cand = DegenerateShape { theta12: t12, theta13: t13, a, x, collision };
                    let dup = solutions.iter().any(|s: &DegenerateShape| {
                        (s.a - a).abs() < 1e-9 && (wrap_pi(s.x - x)).abs() < 1e-9
                    });
                    if !dup {
                        solutions.push(cand);
                    }
                }
            }
        }
    }
    solutions.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.x.total_cmp(&q.x)));
    DegenerateConstraintReport { attainable, boundary, solutions }
}

/// The two angles in `(-π, π]` whose double is `angle` (mod 2π).
fn half_angles(angle: f64) -> [f64; 2] {
    let h = wrap_pi(angle) / 2.0;
    [h, wrap_pi(h + PI)]
}

/// Placement of the meridian configuration on branch `s`.
///
/// Returns `θ_k` wrapped into `(-π, π]` with `θ_1 ∈ (-π/2, π/2]`.
pub fn reconstruct_meridian(shape: &MeridianShape3, masses: &Masses, s: i8) -> Result<[f64; 3]> {
    if s != 1 && s != -1 {
        return Err(Error::InvalidInput(format!("branch sign must be ±1, got {s}")));
    }
    let a = discriminant_a(shape, masses)?;
    if a <= DEGENERATE_A_TOL * masses.total() {
        return Err(Error::DegenerateDiscriminant(a));
    }
    let m = masses.values();
    let offsets = shape.offsets();
    let (mut c, mut sn) = (0.0, 0.0);
    for k in 0..3 {
        let d = -2.0 * offsets[k]; // 2(θ1 − θk)
        c += m[k] * d.cos();
        sn += m[k] * d.sin();
    }
    let sf = f64::from(s);
    let theta1 = (sf * sn).atan2(sf * c) / 2.0;
    Ok(offsets.map(|o| wrap_pi(theta1 + o)))
}

/// `F_ij`, `G_ij` for a meridian shape.
pub fn fg_pair(shape: &MeridianShape3, masses: &Masses, potential: &PotentialKind) -> Result<FgPair> {
    let m = masses.values();
    let diffs = shape.theta_diffs();
    let mut f = [0.0; 3];
    let mut g = [0.0; 3];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        let d = diffs[k];
        let up = potential.u_prime_meridian(d).map_err(|e| with_pair(e, i, j))?;
        f[k] = m[i] * m[j] * d.sin() * up;
        g[k] = m[i] * m[j] * (2.0 * d).sin();
    }
    Ok(FgPair { f, g })
}

/// The shape determinant without the discriminant guard, for scanning.
pub fn det_unchecked(shape: &MeridianShape3, masses: &Masses, potential: &PotentialKind) -> Result<f64> {
    Ok(fg_pair(shape, masses, potential)?.det())
}

/// Shape determinant; zero marks an equilibrium shape when `A ≠ 0`.
pub fn ere_shape_det(
    shape: &MeridianShape3,
    masses: &Masses,
    potential: &PotentialKind,
) -> Result<(f64, FgPair)> {
    let a = discriminant_a(shape, masses)?;
    if a <= DEGENERATE_A_TOL * masses.total() {
        return Err(Error::DegenerateDiscriminant(a));
    }
    let fg = fg_pair(shape, masses, potential)?;
    Ok((fg.det(), fg))
}

/// What the compact equations say about `ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OmegaOutcome {
    Rotating { s: i8, omega2: f64 },
    FixedPoint,
    /// Every entry of the determinant vanishes; `ω` is not fixed by the shape.
    Undetermined,
}

/// Reads `s` and `ω²` off an equilibrium shape.
pub fn ere_omega2(shape: &MeridianShape3, masses: &Masses, potential: &PotentialKind) -> Result<OmegaOutcome> {
    let a = discriminant_a(shape, masses)?;
    if a <= DEGENERATE_A_TOL * masses.total() {
        return Err(Error::DegenerateDiscriminant(a));
    }
    let fg = fg_pair(shape, masses, potential)?;
    let fd = fg.f_diffs();
    let gd = fg.g_diffs();
    let entry_scale = max_abs(&fg.f).max(max_abs(&fg.g));
    let (fmax, gmax) = (max_abs(&fd), max_abs(&gd));
    if fmax <= 1e-12 * entry_scale && gmax <= 1e-12 * entry_scale {
        return Ok(OmegaOutcome::Undetermined);
    }
    let det = fg.det();
    if det.abs() > DET_ZERO_TOL * fg.det_scale().max(f64::MIN_POSITIVE) {
        return Err(Error::NotAnEquilibrium(det));
    }
    if fmax <= 1e-12 * max_abs(&fg.f).max(f64::MIN_POSITIVE) {
        return Ok(OmegaOutcome::FixedPoint);
    }
    if gmax <= 1e-12 * entry_scale {
        return Err(Error::InconsistentRatios(
            "F differences are nonzero while every G difference vanishes".into(),
        ));
    }
    let ratio = dot(&fd, &gd) / dot(&gd, &gd);
    let mismatch = (0..3).map(|k| (fd[k] - ratio * gd[k]).abs()).fold(0.0, f64::max);
    if mismatch > RATIO_TOL * fmax.max(ratio.abs() * gmax) {
        return Err(Error::InconsistentRatios(format!("ratio {ratio}, mismatch {mismatch:e}")));
    }
    if ratio == 0.0 {
        return Ok(OmegaOutcome::FixedPoint);
    }
    Ok(OmegaOutcome::Rotating { s: if ratio > 0.0 { 1 } else { -1 }, omega2: 2.0 * a * ratio.abs() })
}

/// A solved collinear relative equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EreSolution {
    pub shape: MeridianShape3,
    pub thetas: [f64; 3],
    pub s: Option<i8>,
    /// `None` only when `ω` is undetermined by the shape.
    pub omega2: Option<f64>,
    pub fixed_point: bool,
    /// Solved through the `A = 0` path.
    pub degenerate: bool,
    pub residuals: [f64; 3],
    /// Largest single term of the meridian equations, for relative judgement.
    pub residual_scale: f64,
}

impl EreSolution {
    pub fn relative_residual(&self) -> f64 {
        max_abs(&self.residuals) / self.residual_scale.max(f64::MIN_POSITIVE)
    }
}

fn finish(
    shape: MeridianShape3,
    thetas: [f64; 3],
    s: Option<i8>,
    omega2: Option<f64>,
    degenerate: bool,
    masses: &Masses,
    potential: &PotentialKind,
) -> Result<EreSolution> {
    let w2 = omega2.unwrap_or(0.0);
    let residuals = meridian_re_residual(&thetas, masses, w2, potential)?;
    let residual_scale = meridian_residual_scale(&thetas, masses, w2, potential)?;
    Ok(EreSolution {
        shape,
        thetas,
        s,
        omega2,
        fixed_point: omega2 == Some(0.0),
        degenerate,
        residuals,
        residual_scale,
    })
}

/// Solves an equilibrium shape, dispatching on whether `A` vanishes.
pub fn solve_ere(shape: &MeridianShape3, masses: &Masses, potential: &PotentialKind) -> Result<EreSolution> {
    let a = discriminant_a(shape, masses)?;
    if a <= DEGENERATE_A_TOL * masses.total() {
        return solve_degenerate_ere(shape, masses, potential);
    }
    match ere_omega2(shape, masses, potential)? {
        OmegaOutcome::Rotating { s, omega2 } => {
            let thetas = reconstruct_meridian(shape, masses, s)?;
            finish(*shape, thetas, Some(s), Some(omega2), false, masses, potential)
        }
        OmegaOutcome::FixedPoint => {
            let thetas = reconstruct_meridian(shape, masses, 1)?;
            finish(*shape, thetas, None, Some(0.0), false, masses, potential)
        }
        OmegaOutcome::Undetermined => {
            let thetas = reconstruct_meridian(shape, masses, 1)?;
            finish(*shape, thetas, None, None, false, masses, potential)
        }
    }
}

/// Solves the raw meridian equations for a shape with `A = 0`.
///
/// With `D = 0` both the centrifugal vector `a_k = (m_k/2) sin 2θ_k` and the
/// force vector `b_k` sum to zero, so an equilibrium needs `a ∥ b` within that
/// plane. `a` turns with `2θ_1`, which makes the parallel condition a single
/// sinusoid in `2θ_1`; `ω² = a·b / |a|²` is its least-squares value.
pub fn solve_degenerate_ere(
    shape: &MeridianShape3,
    masses: &Masses,
    potential: &PotentialKind,
) -> Result<EreSolution> {
    let m = masses.values();
    let offsets = shape.offsets();
    let b = meridian_re_residual(&offsets, masses, 0.0, potential)?.map(|x| -x);
    let b_scale = meridian_residual_scale(&offsets, masses, 0.0, potential)?;
    if max_abs(&b) <= 1e-12 * b_scale {
        let thetas = offsets.map(wrap_pi);
        return finish(*shape, thetas, None, Some(0.0), true, masses, potential);
    }
    // a(θ1) = sin 2θ1 · u + cos 2θ1 · v
    let u = [0, 1, 2].map(|k| 0.5 * m[k] * (2.0 * offsets[k]).cos());
    let v = [0, 1, 2].map(|k| 0.5 * m[k] * (2.0 * offsets[k]).sin());
    let n = [1.0, 1.0, 1.0];
    let p = dot(&cross(&u, &b), &n);
    let q = dot(&cross(&v, &b), &n);
    let base = (-q).atan2(p);
    let mut best: Option<(f64, f64)> = None;
    for two_theta1 in [base, base + PI] {
        let (s2, c2) = two_theta1.sin_cos();
        let av = [0, 1, 2].map(|k| s2 * u[k] + c2 * v[k]);
        let w2 = dot(&av, &b) / dot(&av, &av);
        if w2 > 0.0 && best.map_or(true, |(_, bw)| w2 > bw) {
            best = Some((wrap_pi(two_theta1) / 2.0, w2));
        }
    }
    let (theta1, omega2) = best.ok_or_else(|| {
        Error::NotAnEquilibrium(max_abs(&b) / b_scale)
    })?;
    let theta1 = if theta1 <= -FRAC_PI_2 { theta1 + PI } else { theta1 };
    let thetas = offsets.map(|o| wrap_pi(theta1 + o));
    let sol = finish(*shape, thetas, None, Some(omega2), true, masses, potential)?;
    if sol.relative_residual() > 1e-8 {
        return Err(Error::NotAnEquilibrium(sol.relative_residual()));
    }
    Ok(sol)
}

/// The same shape as an equilibrium of `−U`: every `θ_k` shifted by `π/2` and
/// `s` flipped. Fixed points are returned unchanged.
pub fn repulsive_mirror(sol: &EreSolution) -> EreSolution {
    if sol.fixed_point {
        return *sol;
    }
    EreSolution {
        thetas: sol.thetas.map(|t| wrap_pi(t + FRAC_PI_2)),
        s: sol.s.map(|s| -s),
        ..*sol
    }
}

/// `sin t |sin t|`.
fn ssq(t: f64) -> f64 {
    let s = t.sin();
    s * s.abs()
}

/// Numerator of the equal-mass cotangent determinant in `(a, x)`.
pub fn g_equal_mass(a: f64, x: f64) -> f64 {
    ssq(x) * ((2.0 * x).sin() + (2.0 * a).sin()) * (ssq(x - a) - ssq(a))
        - ssq(x - a) * ((2.0 * a).sin() - (2.0 * (x - a)).sin()) * (ssq(a) + ssq(x))
}

/// Numerator of the cotangent determinant for general masses, as a cyclic sum
/// over the signed differences of `thetas`.
pub fn g_general(thetas: &[f64; 3], masses: &Masses) -> f64 {
    let t = |i: usize, j: usize| thetas[i] - thetas[j];
    [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        .iter()
        .map(|&(i, j, k)| {
            masses[k]
                * ssq(t(i, j))
                * (ssq(t(k, i)) * (2.0 * t(k, i)).sin() - ssq(t(j, k)) * (2.0 * t(j, k)).sin())
        })
        .sum()
}

/// Classical Euler quintic for collinear masses in line order with
/// `ratio = r23 / r12`.
pub fn classical_euler_quintic(line_masses: [f64; 3], ratio: f64) -> f64 {
    let [m1, m2, m3] = line_masses;
    let x = ratio;
    (m1 + m2) * x.powi(5) + (3.0 * m1 + 2.0 * m2) * x.powi(4) + (3.0 * m1 + m2) * x.powi(3)
        - (m2 + 3.0 * m3) * x * x
        - (2.0 * m2 + 3.0 * m3) * x
        - (m2 + m3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerLimitReport {
    pub epsilon: f64,
    /// `g(εθ)/ε⁵` at `ε` and `ε/2`.
    pub scaled: [f64; 2],
    /// Richardson extrapolation assuming an `ε²` leading error.
    pub extrapolated: f64,
    /// `2 r12⁵ Q(r23/r12)`, the planar value.
    pub planar: f64,
    /// `log2` of the error ratio between `ε` and `ε/2`.
    pub observed_order: f64,
}

/// Shrinks a collinear configuration with spacings `r12, r23 > 0` (bodies in
/// order 1, 2, 3) towards a point and compares `g/ε⁵` with the Euler quintic.
pub fn euler_limit(masses: &Masses, r12: f64, r23: f64, epsilon: f64) -> EulerLimitReport {
    let at = |eps: f64| {
        let th = [0.0, eps * r12, eps * (r12 + r23)];
        g_general(&th, masses) / eps.powi(5)
    };
    let (g1, g2) = (at(epsilon), at(0.5 * epsilon));
    let planar = 2.0 * r12.powi(5) * classical_euler_quintic(masses.values(), r23 / r12);
    let (e1, e2) = ((g1 - planar).abs(), (g2 - planar).abs());
    EulerLimitReport {
        epsilon,
        scaled: [g1, g2],
        extrapolated: (4.0 * g2 - g1) / 3.0,
        planar,
        observed_order: (e1 / e2).log2(),
    }
}

/// Closed form of the critical angle `a_c` where the scalene branch closes.
pub fn critical_angle_ac() -> f64 {
    critical_cos_ac().acos()
}

pub fn critical_cos_ac() -> f64 {
    let r = 78f64.sqrt() / 9.0;
    -1.0 + 0.5 * ((1.0 + r).cbrt() + (1.0 - r).cbrt())
}

/// `cos 2y` on the scalene branch as an unrestricted formula; `NaN` where the
/// radicand is negative.
pub fn scalene_curve_cos2y_raw(a: f64) -> f64 {
    let c2 = (2.0 * a).cos();
    let rad = c2 * c2 - 4.0 * c2 - 4.0;
    a.cos() + a.sin().powi(2) / a.cos() * (c2 + rad.sqrt())
}

/// `cos 2y` of the equal-mass scalene branch in `-a/2 < y < a/2`; `None`
/// outside `π/2 < a < a_c`.
pub fn scalene_curve_y(a: f64) -> Option<f64> {
    if !(a > FRAC_PI_2 && a < critical_angle_ac()) {
        return None;
    }
    let v = scalene_curve_cos2y_raw(a);
    (v.is_finite() && v.abs() <= 1.0).then_some(v)
}

/// The two scalene-branch shapes `(a, ±y)` for a given `a`.
pub fn scalene_curve_shapes(a: f64) -> Option<[MeridianShape3; 2]> {
    let y = scalene_curve_y(a)?.acos() / 2.0;
    Some([MeridianShape3::from_a_y(a, y), MeridianShape3::from_a_y(a, -y)])
}

/// `f(θ) = 2 (1/|sin 2θ|³ + 1/(sin²θ sin 2θ))`.
pub fn isosceles_f(theta: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    2.0 * (1.0 / s2.abs().powi(3) + 1.0 / (theta.sin().powi(2) * s2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoscelesBranch {
    /// Middle body at a pole, `θ < 2π/3`.
    MiddleAtPole,
    /// `θ = 2π/3`: a fixed point with the middle body anywhere.
    FixedPoint,
    /// Middle body on the equator, `θ > 2π/3`.
    MiddleOnEquator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesEre {
    pub theta: f64,
    pub branch: IsoscelesBranch,
    /// `(θ1, θ2, θ3)` with body 3 in the middle: `θ2 − θ3 = θ3 − θ1 = θ`.
    pub thetas: [f64; 3],
    pub omega2: f64,
}

/// Equal-mass cotangent isosceles families, body 3 in the middle.
pub fn isosceles_ere_classify(theta: f64) -> Result<IsoscelesEre> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidInput(format!("isosceles angle must lie in (0, π), got {theta}")));
    }
    if (theta - FRAC_PI_2).abs() < 1e-12 {
        return Err(Error::ExcludedAngle(theta));
    }
    let third = 2.0 * PI / 3.0;
    let (branch, middle, omega2) = if (theta - third).abs() < 1e-12 {
        (IsoscelesBranch::FixedPoint, 0.0, 0.0)
    } else if theta < third {
        (IsoscelesBranch::MiddleAtPole, 0.0, isosceles_f(theta))
    } else {
        (IsoscelesBranch::MiddleOnEquator, FRAC_PI_2, -isosceles_f(theta))
    };
    let thetas = [middle - theta, middle + theta, middle].map(wrap_pi);
    Ok(IsoscelesEre { theta, branch, thetas, omega2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeClass {
    Isosceles,
    Scalene,
}

/// One root of the shape determinant found by [`ere_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EreHit {
    pub shape: MeridianShape3,
    pub det: f64,
    pub class: ShapeClass,
    /// Solution, when the shape could be solved.
    pub solution: Option<EreSolution>,
}

/// Arc angles of a meridian shape, in pair order.
pub fn meridian_arcs(shape: &MeridianShape3) -> [f64; 3] {
    shape.theta_diffs().map(|d| d.cos().clamp(-1.0, 1.0).acos())
}

pub fn classify_shape(shape: &MeridianShape3, tol: f64) -> ShapeClass {
    let [p, q, r] = meridian_arcs(shape);
    if (p - q).abs() <= tol || (q - r).abs() <= tol || (r - p).abs() <= tol {
        ShapeClass::Isosceles
    } else {
        ShapeClass::Scalene
    }
}

/// Values of `x` where the meridian shape has a singular pair, for a given `a`.
fn singular_x(a: f64) -> [f64; 3] {
    [0.0, a, a - PI]
}

fn singular_a(x: f64) -> [f64; 2] {
    [x, x + PI]
}

fn straddles(lo: f64, hi: f64, points: &[f64]) -> bool {
    points.iter().any(|p| (lo - p) * (hi - p) <= 0.0)
}

/// Cell-centred scan grid: `n_a` values of `a` in `(0, π)` and `n_x` values of
/// `x` in `(-π, π)`.
pub fn scan_grid(n_a: usize, n_x: usize) -> (Vec<f64>, Vec<f64>) {
    let a = (0..n_a).map(|i| PI * (i as f64 + 0.5) / n_a as f64).collect();
    let x = (0..n_x).map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / n_x as f64).collect();
    (a, x)
}

/// Determinant values on the scan grid, row-major in `a`; `None` on singular
/// pairs.
pub fn det_grid(
    masses: &Masses,
    potential: &PotentialKind,
    n_a: usize,
    n_x: usize,
) -> Vec<(f64, f64, Option<f64>)> {
    let (ag, xg) = scan_grid(n_a, n_x);
    ag.par_iter()
        .flat_map_iter(|&a| {
            xg.iter()
                .map(move |&x| (a, x, det_unchecked(&MeridianShape3::new_unchecked(a, x), masses, potential).ok()))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Finds the zero set of the shape determinant on a grid.
///
/// Each row (fixed `a`) and column (fixed `x`) is searched for sign changes
/// that do not straddle a singular line; every bracket is bisected to machine
/// precision and the resulting shape solved. Output order is deterministic:
/// row hits by increasing `a`, then column hits by increasing `x`.
pub fn ere_scan(masses: &Masses, potential: &PotentialKind, n_a: usize, n_x: usize) -> Vec<EreHit> {
    let (ag, xg) = scan_grid(n_a, n_x);
    let solve = |shape: MeridianShape3| -> Option<EreHit> {
        let det = det_unchecked(&shape, masses, potential).ok()?;
        let class = classify_shape(&shape, 1e-8);
        let solution = solve_ere(&shape, masses, potential).ok();
        Some(EreHit { shape, det, class, solution })
    };
    let rows: Vec<EreHit> = ag
        .par_iter()
        .flat_map_iter(|&a| {
            let sing = singular_x(a);
            let f = |x: f64| {
                det_unchecked(&MeridianShape3::new_unchecked(a, x), masses, potential).unwrap_or(f64::NAN)
            };
            let vals: Vec<f64> = xg.iter().map(|&x| f(x)).collect();
            let mut hits = Vec::new();
            for k in 0..xg.len() - 1 {
                let (lo, hi) = (xg[k], xg[k + 1]);
                if straddles(lo, hi, &sing) || !(vals[k] * vals[k + 1] < 0.0) {
                    continue;
                }
                if let Some(x) = bisect(f, lo, hi, 0.0) {
                    hits.extend(solve(MeridianShape3::new_unchecked(a, x)));
                }
            }
            hits
        })
        .collect();
    let cols: Vec<EreHit> = xg
        .par_iter()
        .flat_map_iter(|&x| {
            let sing = singular_a(x);
            let f = |a: f64| {
                det_unchecked(&MeridianShape3::new_unchecked(a, x), masses, potential).unwrap_or(f64::NAN)
            };
            let vals: Vec<f64> = ag.iter().map(|&a| f(a)).collect();
            let mut hits = Vec::new();
            for k in 0..ag.len() - 1 {
                let (lo, hi) = (ag[k], ag[k + 1]);
                if straddles(lo, hi, &sing) || !(vals[k] * vals[k + 1] < 0.0) {
                    continue;
                }
                if let Some(a) = bisect(f, lo, hi, 0.0) {
                    hits.extend(solve(MeridianShape3::new_unchecked(a, x)));
                }
            }
            hits
        })
        .collect();
    rows.into_iter().chain(cols).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::meridian_re_residual;

    const COT: PotentialKind = PotentialKind::Cotangent;

    fn shape(a: f64, x: f64) -> MeridianShape3 {
        MeridianShape3::new(a, x).unwrap()
    }

    #[test]
    fn discriminant_examples() {
        let unit = Masses::unit();
        let d = discriminant(&shape(2.0 * PI / 3.0, -2.0 * PI / 3.0), &unit).unwrap();
        assert!(d.d.abs() < 1e-14);
        let m123 = Masses::new([1.0, 2.0, 3.0]).unwrap();
        let d = discriminant(&shape(2.0 * PI / 3.0, -2.0 * PI / 3.0), &m123).unwrap();
        assert!((d.d - 3.0).abs() < 1e-13);
        let d = discriminant(&shape(2.0 * PI / 3.0, PI / 3.0), &unit).unwrap();
        assert!(d.d.abs() < 1e-14);
        // Equal-mass closed form.
        let (a, x) = (1.1f64, -0.4f64);
        let closed = 3.0 + 2.0 * ((2.0 * a).cos() + (2.0 * x).cos() + (2.0 * (x - a)).cos());
        assert!((discriminant(&shape(a, x), &unit).unwrap().d - closed).abs() < 1e-14);
    }

    #[test]
    fn degenerate_constraints_equal_masses() {
        let rep = degenerate_shape_constraints(&Masses::unit());
        assert!(rep.attainable && !rep.boundary);
        let want = [
            (PI / 3.0, -PI / 3.0),
            (PI / 3.0, 2.0 * PI / 3.0),
            (2.0 * PI / 3.0, -2.0 * PI / 3.0),
            (2.0 * PI / 3.0, PI / 3.0),
        ];
        assert_eq!(rep.solutions.len(), 4);
        for (s, (a, x)) in rep.solutions.iter().zip(want) {
            assert!((s.a - a).abs() < 1e-12 && (s.x - x).abs() < 1e-12, "{s:?}");
            assert!(!s.collision);
            let d = discriminant(&shape(s.a, s.x), &Masses::unit()).unwrap();
            assert!(d.d.abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_constraints_other_masses() {
        let rep = degenerate_shape_constraints(&Masses::new([5.0, 1.0, 1.0]).unwrap());
        assert!(!rep.attainable && rep.solutions.is_empty());
        let rep = degenerate_shape_constraints(&Masses::new([2.0, 1.0, 1.0]).unwrap());
        assert!(rep.attainable && rep.boundary);
        assert!(!rep.solutions.is_empty());
        assert!(rep.solutions.iter().all(|s| s.collision));
    }

    #[test]
    fn reconstruct_examples() {
        let unit = Masses::unit();
        let iso = shape(1.0, 0.5);
        let th = reconstruct_meridian(&iso, &unit, 1).unwrap();
        assert!((th[0] + 0.5).abs() < 1e-14 && (th[1] - 0.5).abs() < 1e-14 && th[2].abs() < 1e-14);
        let other = reconstruct_meridian(&iso, &unit, -1).unwrap();
        for k in 0..3 {
            assert!((wrap_pi(other[k] - th[k]).abs() - FRAC_PI_2).abs() < 1e-14);
        }
        let sum: f64 = th.iter().map(|t| (2.0 * t).sin()).sum();
        assert!(sum.abs() < 1e-14);

        let m123 = Masses::new([1.0, 2.0, 3.0]).unwrap();
        let eq = shape(2.0 * PI / 3.0, -2.0 * PI / 3.0);
        let a = 3f64.sqrt();
        for s in [1i8, -1] {
            let th = reconstruct_meridian(&eq, &m123, s).unwrap();
            let m = m123.values();
            // a ≥ 0 is the mirror image of θ1 − θ2 = 2π/3, so the sign flips.
            for (k, (i, j)) in [(0, (1, 2)), (1, (2, 0)), (2, (0, 1))] {
                let want = f64::from(s) * 3f64.sqrt() * (m[i] - m[j]) / (2.0 * a);
                assert!(((2.0 * th[k]).sin() - want).abs() < 1e-13, "s={s} k={k}");
            }
        }
        assert!(matches!(
            reconstruct_meridian(&shape(2.0 * PI / 3.0, PI / 3.0), &unit, 1),
            Err(Error::DegenerateDiscriminant(_))
        ));
    }

    #[test]
    fn det_examples() {
        let unit = Masses::unit();
        let (d, fg) = ere_shape_det(&shape(1.0, 0.5), &unit, &COT).unwrap();
        assert!(d.abs() < 1e-12 * fg.det_scale());
        let (d, fg) = ere_shape_det(&shape(1.0, 0.4), &unit, &COT).unwrap();
        assert!(d.abs() > 1e-3 * fg.det_scale());
        let a = 1.7;
        for s in scalene_curve_shapes(a).unwrap() {
            let (d, fg) = ere_shape_det(&s, &unit, &COT).unwrap();
            assert!(d.abs() < 1e-10 * fg.det_scale(), "{d} vs {}", fg.det_scale());
            assert!(g_equal_mass(s.a, s.x).abs() < 1e-10);
        }
    }

    #[test]
    fn omega2_examples() {
        let unit = Masses::unit();
        let OmegaOutcome::Rotating { s, omega2 } = ere_omega2(&shape(1.0, 0.5), &unit, &COT).unwrap() else {
            panic!("expected rotation")
        };
        assert_eq!(s, 1);
        assert!((omega2 - isosceles_f(0.5)).abs() < 1e-12);
        let th = reconstruct_meridian(&shape(1.0, 0.5), &unit, s).unwrap();
        let r = meridian_re_residual(&th, &unit, omega2, &COT).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");

        let m123 = Masses::new([1.0, 2.0, 3.0]).unwrap();
        let OmegaOutcome::Rotating { s, omega2 } =
            ere_omega2(&shape(2.0 * PI / 3.0, -2.0 * PI / 3.0), &m123, &COT).unwrap()
        else {
            panic!("expected rotation")
        };
        assert_eq!(s, -1);
        assert!((omega2 - 16.0 / 3.0).abs() < 1e-12, "{omega2}");

        assert!(matches!(
            ere_omega2(&shape(1.0, 0.4), &unit, &COT),
            Err(Error::NotAnEquilibrium(_))
        ));
    }

    #[test]
    fn degenerate_solver() {
        let unit = Masses::unit();
        let sol = solve_ere(&shape(2.0 * PI / 3.0, PI / 3.0), &unit, &COT).unwrap();
        assert!(sol.degenerate && !sol.fixed_point);
        let want = [-PI / 3.0, PI / 3.0, 0.0];
        for k in 0..3 {
            assert!((sol.thetas[k] - want[k]).abs() < 1e-12, "{:?}", sol.thetas);
        }
        assert!((sol.omega2.unwrap() - 32.0 / (3.0 * 3f64.sqrt())).abs() < 1e-12);

        let fp = solve_ere(&shape(2.0 * PI / 3.0, -2.0 * PI / 3.0), &unit, &COT).unwrap();
        assert!(fp.fixed_point && fp.degenerate);
        assert_eq!(fp.omega2, Some(0.0));
        assert!(fp.relative_residual() < 1e-12);
    }

    #[test]
    fn critical_angle() {
        let ac = critical_angle_ac();
        assert!((critical_cos_ac() + 0.23931).abs() < 1e-5);
        assert!((scalene_curve_cos2y_raw(ac) - 1.0).abs() < 1e-12);
        assert!(scalene_curve_y(FRAC_PI_2).is_none());
        assert!(scalene_curve_y(ac + 1e-3).is_none());
        assert!(scalene_curve_y(1.0).is_none());
        let v = scalene_curve_y(FRAC_PI_2 + 1e-6).unwrap();
        assert!(v.abs() < 1e-4);
    }

    #[test]
    fn isosceles_classifier() {
        let e = isosceles_ere_classify(PI / 3.0).unwrap();
        assert_eq!(e.branch, IsoscelesBranch::MiddleAtPole);
        assert!((e.omega2 - 32.0 / (3.0 * 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(e.thetas[2], 0.0);

        let e = isosceles_ere_classify(2.0 * PI / 3.0).unwrap();
        assert_eq!(e.branch, IsoscelesBranch::FixedPoint);
        assert_eq!(e.omega2, 0.0);

        let e = isosceles_ere_classify(0.75 * PI).unwrap();
        assert_eq!(e.branch, IsoscelesBranch::MiddleOnEquator);
        assert!((e.omega2 - 2.0).abs() < 1e-12, "{}", e.omega2);

        assert_eq!(isosceles_ere_classify(FRAC_PI_2), Err(Error::ExcludedAngle(FRAC_PI_2)));
        for theta in [0.2, 0.5, 1.0, 1.9, 2.2, 2.5, 3.0] {
            let e = isosceles_ere_classify(theta).unwrap();
            assert!(e.omega2 >= 0.0);
            let r = meridian_re_residual(&e.thetas, &Masses::unit(), e.omega2, &COT).unwrap();
            let scale = meridian_residual_scale(&e.thetas, &Masses::unit(), e.omega2, &COT).unwrap();
            assert!(max_abs(&r) < 1e-12 * scale, "theta {theta}: {r:?}");
        }
    }

    #[test]
    fn mirror_examples() {
        let unit = Masses::unit();
        let sol = solve_ere(&shape(1.0, 0.5), &unit, &COT).unwrap();
        let m = repulsive_mirror(&sol);
        assert_eq!(m.s, Some(-1));
        let neg = COT.negated();
        let r = meridian_re_residual(&m.thetas, &unit, m.omega2.unwrap(), &neg).unwrap();
        assert!(max_abs(&r) < 1e-10 * sol.residual_scale);
        let back = repulsive_mirror(&m);
        for k in 0..3 {
            let d = wrap_pi(back.thetas[k] - sol.thetas[k]);
            assert!(d.abs() < 1e-14 || (d.abs() - PI).abs() < 1e-14);
        }
        let fp = solve_ere(&shape(2.0 * PI / 3.0, -2.0 * PI / 3.0), &unit, &COT).unwrap();
        assert_eq!(repulsive_mirror(&fp), fp);
    }

    #[test]
    fn g_forms_agree() {
        for (a, x) in [(1.0, 0.4), (2.3, -1.2), (0.4, 2.9), (1.7, 0.3)] {
            let ge = g_equal_mass(a, x);
            let gg = g_general(&[0.0, a, x], &Masses::unit());
            assert!((ge - gg).abs() < 1e-12 * ge.abs().max(1e-3), "{ge} vs {gg}");
            let det = det_unchecked(&shape(a, x), &Masses::unit(), &COT).unwrap();
            let den = ssq(x) * ssq(a) * ssq(x - a);
            assert!((det - ge / den).abs() < 1e-9 * det.abs().max(1.0));
        }
    }
}
