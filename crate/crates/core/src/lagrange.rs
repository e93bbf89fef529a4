//! Triangular (Lagrangian) relative equilibria.
//!
//! A shape `σ_ij` rotates rigidly iff the shape matrix `J` has the eigenvector
//! `Ψ_L ∝ (√m1/U′23, √m2/U′31, √m3/U′12)`. The polar angles then follow from
//! `λ = Ψ_Lᵀ J Ψ_L`, the azimuth differences from the arc-angle relation, and
//! `ω² = U′12 U′23 U′31 Σ_k m_k / U′(opposite k)²`.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::dynamics::{potential_gradient, rigid_rotation_residual};
use crate::error::{Error, Result};
use crate::geometry::{cos_arc, BodyPosition, Config, Shape3, PAIRS};
use crate::inertia::shape_matrix;
use crate::linalg::{dot, mat_vec, norm, Vec3};
use crate::masses::Masses;
use crate::potential::{with_pair, PotentialKind, SINGULAR_SIN2};
use crate::roots::{all_roots, linspace};

/// Residual norm (times total mass) below which a shape counts as an LRE.
pub const LRE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hemisphere {
    North,
    South,
}

/// Sign of `sin(φ_i − φ_j)` over the cyclic pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Winding {
    Negative,
    Positive,
}

/// One of the four copies of an LRE sharing the same arc angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orientation {
    pub hemisphere: Hemisphere,
    pub winding: Winding,
}

impl Orientation {
    /// `cos θ_k > 0` and `sin Δφ < 0`.
    pub const CANONICAL: Self = Self { hemisphere: Hemisphere::North, winding: Winding::Negative };

    pub fn all() -> [Self; 4] {
        [
            Self::CANONICAL,
            Self { hemisphere: Hemisphere::North, winding: Winding::Positive },
            Self { hemisphere: Hemisphere::South, winding: Winding::Negative },
            Self { hemisphere: Hemisphere::South, winding: Winding::Positive },
        ]
    }
}

impl Default for Orientation {
    fn default() -> Self {
        Self::CANONICAL
    }
}

/// A reconstructed Lagrangian relative equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LreCandidate {
    pub shape: Shape3,
    pub psi_l: Vec3,
    pub lambda: f64,
    pub cos_thetas: [f64; 3],
    pub config: Config,
    /// `(φ1 − φ2, φ2 − φ3, φ3 − φ1)`.
    pub phi_diffs: [f64; 3],
    pub omega2: f64,
    /// `ω²` read from `U′12 / (cos θ1 cos θ2) · Σ m cos²θ`.
    pub omega2_alt: f64,
    pub orientation: Orientation,
    /// Eigenvector condition `J Ψ_L − λ Ψ_L`.
    pub condition_residual: Vec3,
    /// `(θ̈, φ̈)` of the rigid rotation.
    pub eom_residual: [f64; 6],
    /// Magnitude the EOM residuals are judged against.
    pub eom_scale: f64,
}

impl LreCandidate {
    pub fn relative_eom_residual(&self) -> f64 {
        self.eom_residual.iter().fold(0.0, |a: f64, r| a.max(r.abs())) / self.eom_scale.max(f64::MIN_POSITIVE)
    }
}

/// `(U′12, U′23, U′31)`.
fn u_primes(shape: &Shape3, potential: &PotentialKind) -> Result<[f64; 3]> {
    if !potential.is_attractive() {
        return Err(Error::NoLreForRepulsive);
    }
    let c = shape.cosines();
    let mut out = [0.0; 3];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        out[k] = potential.u_prime(c[k]).map_err(|e| with_pair(e, i, j))?;
    }
    Ok(out)
}

/// `U′` of the side opposite each body: `(U′23, U′31, U′12)`.
fn opposite(up: &[f64; 3]) -> [f64; 3] {
    [up[1], up[2], up[0]]
}

/// Normalized `Ψ_L`; all entries positive for an attractive potential.
pub fn lre_eigvec_target(shape: &Shape3, masses: &Masses, potential: &PotentialKind) -> Result<Vec3> {
    let opp = opposite(&u_primes(shape, potential)?);
    let r = masses.sqrt();
    let v = [0, 1, 2].map(|k| r[k] / opp[k]);
    let n = norm(&v);
    Ok(v.map(|x| x / n))
}

/// `J Ψ_L − (Ψ_Lᵀ J Ψ_L) Ψ_L`; zero iff the shape forms an LRE.
pub fn lre_condition_residual(shape: &Shape3, masses: &Masses, potential: &PotentialKind) -> Result<Vec3> {
    let psi = lre_eigvec_target(shape, masses, potential)?;
    let j = shape_matrix(shape, masses);
    let jpsi = mat_vec(&j.0, &psi);
    let lambda = dot(&psi, &jpsi);
    Ok([0, 1, 2].map(|k| jpsi[k] - lambda * psi[k]))
}

/// `ω² = U′12 U′23 U′31 Σ_k m_k / U′(opposite k)²`.
pub fn lre_omega2(shape: &Shape3, masses: &Masses, potential: &PotentialKind) -> Result<f64> {
    let up = u_primes(shape, potential)?;
    let opp = opposite(&up);
    let sum: f64 = (0..3).map(|k| masses[k] / (opp[k] * opp[k])).sum();
    Ok(up[0] * up[1] * up[2] * sum)
}

/// Largest change of a side accepted by [`lre_polish`].
pub const POLISH_RADIUS: f64 = 1e-3;

/// Moves `σ23, σ31` of an approximate LRE shape onto the solution set with
/// `σ12` held fixed (Gauss–Newton on the condition residual). Fails when no
/// solution lies within [`POLISH_RADIUS`] of the input.
pub fn lre_polish(shape: &Shape3, masses: &Masses, potential: &PotentialKind) -> Result<Shape3> {
    let tol = 1e-13 * masses.total();
    let start = lre_condition_residual(shape, masses, potential)?;
    let s12 = shape.sides()[0];
    let eval = |p: [f64; 2]| -> Option<(Shape3, Vec3)> {
        let sh = Shape3::new(s12, p[0], p[1]).ok()?;
        let r = lre_condition_residual(&sh, masses, potential).ok()?;
        Some((sh, r))
    };
    let [_, a, b] = shape.sides();
    let mut p = [a, b];
    let (mut best, mut r) = eval(p).ok_or_else(|| Error::UnrealizableShape(format!("{:?}", shape.sides())))?;
    for _ in 0..60 {
        if norm(&r) < tol {
            break;
        }
        let h = 1e-7;
        let mut jac = [[0.0; 2]; 3];
        for c in 0..2 {
            let (mut hi, mut lo) = (p, p);
            hi[c] += h;
            lo[c] -= h;
            let (Some((_, rh)), Some((_, rl))) = (eval(hi), eval(lo)) else { break };
            for k in 0..3 {
                jac[k][c] = (rh[k] - rl[k]) / (2.0 * h);
            }
        }
        // Normal equations of the 3×2 least-squares step.
        let g = |i: usize, j: usize| (0..3).map(|k| jac[k][i] * jac[k][j]).sum::<f64>();
        let q = |i: usize| (0..3).map(|k| jac[k][i] * r[k]).sum::<f64>();
        let det = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
        if det.abs() < f64::MIN_POSITIVE {
            break;
        }
        let step = [(g(1, 1) * q(0) - g(0, 1) * q(1)) / det, (g(0, 0) * q(1) - g(0, 1) * q(0)) / det];
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let trial = [p[0] - t * step[0], p[1] - t * step[1]];
            if let Some((sh, rt)) = eval(trial) {
                if norm(&rt) < norm(&r) {
                    (p, best, r, moved) = (trial, sh, rt, true);
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let shift = (p[0] - a).abs().max((p[1] - b).abs());
    if norm(&r) < 1e-10 * masses.total() && shift <= POLISH_RADIUS {
        Ok(best)
    } else {
        Err(Error::NotAnEquilibrium(norm(&start)))
    }
}

/// Rebuilds the configuration of an LRE shape in the requested orientation.
pub fn lre_reconstruct(
    shape: &Shape3,
    masses: &Masses,
    potential: &PotentialKind,
    orientation: Orientation,
) -> Result<LreCandidate> {
    let total = masses.total();
    let psi_l = lre_eigvec_target(shape, masses, potential)?;
    let j = shape_matrix(shape, masses);
    let jpsi = mat_vec(&j.0, &psi_l);
    let lambda = dot(&psi_l, &jpsi);
    let condition_residual = [0, 1, 2].map(|k| jpsi[k] - lambda * psi_l[k]);
    if norm(&condition_residual) > 1e-8 * total {
        return Err(Error::NotAnEquilibrium(norm(&condition_residual)));
    }
    let gap = total - lambda;
    if gap <= 0.0 {
        return Err(Error::ReconstructionOutOfRange(format!("λ = {lambda} is not below M = {total}")));
    }
    let r = masses.sqrt();
    let mut cos_t = [0.0; 3];
    for k in 0..3 {
        let c = gap.sqrt() * psi_l[k] / r[k];
        if c >= 1.0 - 1e-14 {
            return Err(Error::ReconstructionOutOfRange(format!("cos θ_{} = {c}", k + 1)));
        }
        cos_t[k] = c;
    }
    let sin_t = cos_t.map(|c| (1.0 - c * c).sqrt());
    let cs = shape.cosines();
    let mut dphi = [0.0; 3];
    for (k, &(i, jj)) in PAIRS.iter().enumerate() {
        let cd = (cs[k] - cos_t[i] * cos_t[jj]) / (sin_t[i] * sin_t[jj]);
        if cd.abs() > 1.0 + 1e-9 {
            return Err(Error::ReconstructionOutOfRange(format!(
                "cos(φ{} − φ{}) = {cd}",
                i + 1,
                jj + 1
            )));
        }
        dphi[k] = -cd.clamp(-1.0, 1.0).acos();
    }
    let closure = dphi.iter().sum::<f64>() + TAU;
    if closure.abs() > 1e-8 {
        return Err(Error::ReconstructionOutOfRange(format!(
            "azimuth differences do not close around the axis (off by {closure:e})"
        )));
    }
    if orientation.winding == Winding::Positive {
        dphi = dphi.map(|d| -d);
    }
    let thetas = cos_t.map(|c| match orientation.hemisphere {
        Hemisphere::North => c.acos(),
        Hemisphere::South => PI - c.acos(),
    });
    let phi2 = (-dphi[0]).rem_euclid(TAU);
    let phi3 = (phi2 - dphi[1]).rem_euclid(TAU);
    let config = [
        BodyPosition::new(thetas[0], 0.0),
        BodyPosition::new(thetas[1], phi2),
        BodyPosition::new(thetas[2], phi3),
    ];
    for (k, &(i, jj)) in PAIRS.iter().enumerate() {
        let c = cos_arc(&config[i], &config[jj]);
        if (c - cs[k]).abs() > 1e-10 {
            return Err(Error::Internal(format!("arc cosine {c} does not reproduce {}", cs[k])));
        }
    }
    let cos_thetas = thetas.map(f64::cos);
    let omega2 = lre_omega2(shape, masses, potential)?;
    no_fixed_point(omega2)?;
    let up = u_primes(shape, potential)?;
    let weighted: f64 = (0..3).map(|k| masses[k] * cos_thetas[k].powi(2)).sum();
    let omega2_alt = up[0] / (cos_thetas[0] * cos_thetas[1]) * weighted;
    let eom_residual = rigid_rotation_residual(&config, masses, potential, omega2)?;
    let (grad, _) = potential_gradient(&config, masses, potential)?;
    let eom_scale = (0..3).fold(omega2, |a, k| a.max((grad[k] / masses[k]).abs()));
    Ok(LreCandidate {
        shape: *shape,
        psi_l,
        lambda,
        cos_thetas,
        config,
        phi_diffs: dphi,
        omega2,
        omega2_alt,
        orientation,
        condition_residual,
        eom_residual,
        eom_scale,
    })
}

fn no_fixed_point(omega2: f64) -> Result<()> {
    if omega2.is_finite() && omega2 > 0.0 {
        Ok(())
    } else {
        Err(Error::FixedPointLre(omega2))
    }
}

/// Guard that a solved LRE really rotates. Returns `false` for a shape that
/// is not an LRE at all.
pub fn no_fixed_point_lre_check(shape: &Shape3, masses: &Masses, potential: &PotentialKind) -> Result<bool> {
    let res = lre_condition_residual(shape, masses, potential)?;
    if norm(&res) > LRE_TOL * masses.total() {
        return Ok(false);
    }
    no_fixed_point(lre_omega2(shape, masses, potential)?)?;
    Ok(true)
}

/// Rejects a claimed LRE angular velocity of zero.
pub fn ensure_rotating(omega2: f64) -> Result<()> {
    no_fixed_point(omega2)
}

fn sin_checked(cos: f64, pair: (usize, usize)) -> Result<f64> {
    let s2 = 1.0 - cos * cos;
    if s2 < SINGULAR_SIN2 {
        return Err(Error::SingularSeparation { i: pair.0, j: pair.1, cos_sigma: cos });
    }
    Ok(s2.sqrt())
}

/// Equal-mass cotangent condition: pairwise differences of
/// `(cos σ_jk sin³σ_ki + sin³σ_jk cos σ_ki) / sin³σ_ij` over the cyclic pairs.
pub fn equal_mass_lre_residuals(shape: &Shape3) -> Result<[f64; 3]> {
    let c = shape.cosines();
    let mut s = [0.0; 3];
    for (k, &pair) in PAIRS.iter().enumerate() {
        s[k] = sin_checked(c[k], pair)?;
    }
    // pair index k = ij, then (k+1) = jk and (k+2) = ki
    let rhs = [0, 1, 2].map(|k| {
        let (jk, ki) = ((k + 1) % 3, (k + 2) % 3);
        (c[jk] * s[ki].powi(3) + s[jk].powi(3) * c[ki]) / s[k].powi(3)
    });
    Ok([rhs[0] - rhs[1], rhs[1] - rhs[2], rhs[2] - rhs[0]])
}

/// `q(σ, σ12) = cos σ (2 sin⁶σ − sin⁶σ12) − sin³σ cos σ12 sin³σ12`.
pub fn isosceles_lre_q(sigma: f64, sigma12: f64) -> f64 {
    let (s, c) = sigma.sin_cos();
    let (s12, c12) = sigma12.sin_cos();
    c * (2.0 * s.powi(6) - s12.powi(6)) - s.powi(3) * c12 * s12.powi(3)
}

/// Open interval of `σ = σ23 = σ31` forming a triangle with base `σ12`.
pub fn isosceles_window(sigma12: f64) -> (f64, f64) {
    (0.5 * sigma12, PI - 0.5 * sigma12)
}

/// Roots of `q(·, σ12)` inside the realizable window, ascending. The
/// equilateral root `σ = σ12` is always included.
pub fn isosceles_lre_roots(sigma12: f64, samples: usize) -> Vec<f64> {
    let (lo, hi) = isosceles_window(sigma12);
    let pad = 1e-9 * (hi - lo);
    let grid = linspace(lo + pad, hi - pad, samples.max(3));
    let mut roots = all_roots(|s| isosceles_lre_q(s, sigma12), &grid, 0.0);
    roots.push(sigma12);
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesLrePoint {
    pub sigma12: f64,
    pub sigma: f64,
    pub equilateral: bool,
    pub omega2: f64,
    pub lambda: f64,
    /// `|J Ψ_L − λ Ψ_L|` at the root.
    pub residual: f64,
    /// `q(π − σ, π − σ12)`, zero by point symmetry.
    pub mirror_q: f64,
}

/// Isosceles equal-mass cotangent LRE over a cell-centred grid of `σ12`.
pub fn isosceles_lre_scan(n: usize, samples: usize) -> Vec<IsoscelesLrePoint> {
    let unit = Masses::unit();
    let pot = PotentialKind::Cotangent;
    let grid: Vec<f64> = (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect();
    grid.par_iter()
        .flat_map_iter(|&s12| {
            isosceles_lre_roots(s12, samples)
                .into_iter()
                .filter_map(|s| {
                    let shape = Shape3::new_unchecked(s12, s, s);
                    let psi = lre_eigvec_target(&shape, &unit, &pot).ok()?;
                    let j = shape_matrix(&shape, &unit);
                    let jpsi = mat_vec(&j.0, &psi);
                    let lambda = dot(&psi, &jpsi);
                    let residual = norm(&[0, 1, 2].map(|k| jpsi[k] - lambda * psi[k]));
                    Some(IsoscelesLrePoint {
                        sigma12: s12,
                        sigma: s,
                        equilateral: (s - s12).abs() < 1e-9,
                        omega2: lre_omega2(&shape, &unit, &pot).ok()?,
                        lambda,
                        residual,
                        mirror_q: isosceles_lre_q(PI - s, PI - s12),
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Summary of the search for scalene equal-mass LRE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleneSearchReport {
    pub resolution: usize,
    /// Distance kept from the isosceles loci, the realizability boundary and
    /// collisions.
    pub margin: f64,
    pub grid_points: usize,
    pub local_minima: usize,
    pub polished: usize,
    pub best_shape: Option<[f64; 3]>,
    pub best_residual: f64,
    /// Distance of the best shape from the nearest isosceles locus.
    pub best_isosceles_distance: f64,
    /// Excluded sets the best shape sits against; empty when it lies in the
    /// interior of the search region.
    pub best_constraints: Vec<SearchConstraint>,
    pub floor: f64,
    pub below_floor: bool,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchConstraint {
    Isosceles,
    /// A side close to `0` or `π`.
    Collision,
    Realizability,
}

/// Distances from the isosceles loci, collisions and the realizability
/// boundary.
fn scalene_distances(s: &[f64; 3]) -> [f64; 3] {
    let shape = Shape3::new_unchecked(s[0], s[1], s[2]);
    let iso = (s[0] - s[1]).abs().min((s[1] - s[2]).abs()).min((s[2] - s[0]).abs());
    let side = s.iter().fold(f64::INFINITY, |a, &x| a.min(x).min(PI - x));
    [iso, side, shape.realizability_margin()]
}

/// Distance from the excluded set; negative outside the search region.
fn scalene_margin(s: &[f64; 3]) -> f64 {
    let [a, b, c] = scalene_distances(s);
    a.min(b).min(c)
}

fn active_constraints(s: &[f64; 3], margin: f64) -> Vec<SearchConstraint> {
    let d = scalene_distances(s);
    [SearchConstraint::Isosceles, SearchConstraint::Collision, SearchConstraint::Realizability]
        .into_iter()
        .zip(d)
        .filter(|(_, x)| *x < margin * (1.0 + 1e-3))
        .map(|(c, _)| c)
        .collect()
}

fn lre_residual_norm(s: &[f64; 3]) -> f64 {
    let shape = Shape3::new_unchecked(s[0], s[1], s[2]);
    lre_condition_residual(&shape, &Masses::unit(), &PotentialKind::Cotangent)
        .map(|r| norm(&r))
        .unwrap_or(f64::INFINITY)
}

struct ScaleneObjective {
    margin: f64,
}

impl CostFunction for ScaleneObjective {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let s = [p[0], p[1], p[2]];
        let d = scalene_margin(&s);
        if d < self.margin {
            return Ok(1e3 + (self.margin - d));
        }
        Ok(lre_residual_norm(&s))
    }
}

/// Grid search plus Nelder–Mead polish of `|J Ψ_L − λ Ψ_L|` over equal-mass
/// scalene shapes kept `margin` away from the isosceles loci, collisions and
/// the realizability boundary.
///
/// The result is numerical evidence about the absence of scalene solutions,
/// not a proof.
pub fn scalene_lre_search(resolution: usize, margin: f64, max_polish: usize) -> ScaleneSearchReport {
    let n = resolution.max(4);
    let h = PI / n as f64;
    let axis: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let values: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|t| {
            let (i, j, k) = (t / (n * n), (t / n) % n, t % n);
            let s = [axis[i], axis[j], axis[k]];
            if scalene_margin(&s) < margin {
                f64::INFINITY
            } else {
                lre_residual_norm(&s)
            }
        })
        .collect();
    let grid_points = values.iter().filter(|v| v.is_finite()).count();
    let mut minima: Vec<(f64, usize)> = (0..n * n * n)
        .into_par_iter()
        .filter_map(|t| {
            let v = values[t];
            if !v.is_finite() {
                return None;
            }
            let (i, j, k) = (t / (n * n), (t / n) % n, t % n);
            let lower = |a: usize, b: usize, c: usize| values[idx(a, b, c)] < v;
            let neighbours = [
                (i > 0).then(|| (i - 1, j, k)),
                (i + 1 < n).then(|| (i + 1, j, k)),
                (j > 0).then(|| (i, j - 1, k)),
                (j + 1 < n).then(|| (i, j + 1, k)),
                (k > 0).then(|| (i, j, k - 1)),
                (k + 1 < n).then(|| (i, j, k + 1)),
            ];
            let is_min = neighbours.iter().flatten().all(|&(a, b, c)| !lower(a, b, c));
            is_min.then_some((v, t))
        })
        .collect();
    minima.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let local_minima = minima.len();
    let polished: Vec<([f64; 3], f64)> = minima
        .par_iter()
        .take(max_polish)
        .map(|&(v, t)| {
            let s0 = [axis[t / (n * n)], axis[(t / n) % n], axis[t % n]];
            polish_scalene(s0, v, margin, 0.5 * h)
        })
        .collect();
    let best = polished.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1));
    let (best_shape, best_residual) = match best {
        Some((s, r)) => (Some(s), r),
        None => (None, f64::INFINITY),
    };
    let best_isosceles_distance = best_shape
        .map(|s| (s[0] - s[1]).abs().min((s[1] - s[2]).abs()).min((s[2] - s[0]).abs()))
        .unwrap_or(f64::NAN);
    let floor = 1e-8;
    let best_constraints = best_shape.map_or(Vec::new(), |s| active_constraints(&s, margin));
    ScaleneSearchReport {
        resolution: n,
        margin,
        grid_points,
        local_minima,
        polished: polished.len(),
        best_shape,
        best_residual,
        best_isosceles_distance,
        best_constraints,
        floor,
        below_floor: best_residual < floor,
        note: "numerical evidence from a finite search, not a proof of nonexistence".into(),
    }
}

fn polish_scalene(start: [f64; 3], start_value: f64, margin: f64, step: f64) -> ([f64; 3], f64) {
    let mut simplex = vec![start.to_vec()];
    for d in 0..3 {
        let mut v = start.to_vec();
        v[d] += if scalene_margin(&start) - step >= margin { step } else { -step };
        simplex.push(v);
    }
    let fallback = (start, start_value);
    let Ok(solver) = NelderMead::new(simplex).with_sd_tolerance(1e-16) else {
        return fallback;
    };
    let run = Executor::new(ScaleneObjective { margin }, solver)
        .configure(|st| st.max_iters(4000))
        .run();
    match run {
        Ok(res) => {
            let state = res.state();
            match state.get_best_param() {
                Some(p) if state.get_best_cost() < start_value => {
                    ([p[0], p[1], p[2]], state.get_best_cost())
                }
                _ => fallback,
            }
        }
        Err(_) => fallback,
    }
}

/// Right-angled equal-mass LRE at the symmetry centre.
pub fn right_angled_shape() -> Shape3 {
    Shape3::new_unchecked(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)
}
