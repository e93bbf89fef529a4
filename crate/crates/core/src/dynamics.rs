//! Lagrangian mechanics of three bodies on the unit sphere.
//!
//! The Lagrangian is `L = K + V` with
//! `K = Σ m_k/2 (θ̇_k² + sin²θ_k φ̇_k²)` and `V = Σ_{i<j} m_i m_j U(cos σ_ij)`.
//! Because `V` enters with a plus sign, the conserved energy is **`E = K − V`**.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cos_arc, BodyPosition, Config, PAIRS};
use crate::masses::Masses;
use crate::potential::{with_pair, PotentialKind};

/// Positions and velocities of the three bodies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub theta: [f64; 3],
    pub phi: [f64; 3],
    pub theta_dot: [f64; 3],
    pub phi_dot: [f64; 3],
}

impl PhaseState {
    pub fn at_rest(config: &Config) -> Self {
        Self {
            theta: config.map(|p| p.theta),
            phi: config.map(|p| p.phi),
            theta_dot: [0.0; 3],
            phi_dot: [0.0; 3],
        }
    }

    /// Rigid rotation about z: `θ̇ = 0`, `φ̇_k = ω`.
    pub fn rigid_rotation(config: &Config, omega: f64) -> Self {
        Self { phi_dot: [omega; 3], ..Self::at_rest(config) }
    }

    pub fn config(&self) -> Config {
        [0, 1, 2].map(|k| BodyPosition::new(self.theta[k], self.phi[k]))
    }

    pub fn is_finite(&self) -> bool {
        self.theta
            .iter()
            .chain(&self.phi)
            .chain(&self.theta_dot)
            .chain(&self.phi_dot)
            .all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularMomentum {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

impl AngularMomentum {
    pub fn as_array(&self) -> [f64; 3] {
        [self.cx, self.cy, self.cz]
    }
}

pub fn angular_momentum(state: &PhaseState, masses: &Masses) -> AngularMomentum {
    let mut c = [0.0; 3];
    for k in 0..3 {
        let m = masses[k];
        let (st, ct) = state.theta[k].sin_cos();
        let (sp, cp) = state.phi[k].sin_cos();
        let (td, pd) = (state.theta_dot[k], state.phi_dot[k]);
        c[0] += m * (-sp * td - st * ct * cp * pd);
        c[1] += m * (cp * td - st * ct * sp * pd);
        c[2] += m * st * st * pd;
    }
    AngularMomentum { cx: c[0], cy: c[1], cz: c[2] }
}

/// Closed form of the angular momentum for a rigid rotation about z.
pub fn rigid_rotation_momentum(config: &Config, masses: &Masses, omega: f64) -> AngularMomentum {
    let mut c = [0.0; 3];
    for (k, p) in config.iter().enumerate() {
        let (st, ct) = p.theta.sin_cos();
        c[0] -= omega * masses[k] * st * ct * p.phi.cos();
        c[1] -= omega * masses[k] * st * ct * p.phi.sin();
        c[2] += omega * masses[k] * st * st;
    }
    AngularMomentum { cx: c[0], cy: c[1], cz: c[2] }
}

pub fn kinetic_energy(state: &PhaseState, masses: &Masses) -> f64 {
    (0..3)
        .map(|k| {
            let st = state.theta[k].sin();
            0.5 * masses[k] * (state.theta_dot[k].powi(2) + st * st * state.phi_dot[k].powi(2))
        })
        .sum()
}

/// `V = Σ_{i<j} m_i m_j U(cos σ_ij)`.
pub fn potential_energy(config: &Config, masses: &Masses, potential: &PotentialKind) -> Result<f64> {
    PAIRS.iter().try_fold(0.0, |acc, &(i, j)| {
        let c = cos_arc(&config[i], &config[j]);
        let u = potential.u_value(c).map_err(|e| with_pair(e, i, j))?;
        Ok(acc + masses[i] * masses[j] * u)
    })
}

/// Conserved energy `E = K − V`.
pub fn energy(state: &PhaseState, masses: &Masses, potential: &PotentialKind) -> Result<f64> {
    Ok(kinetic_energy(state, masses) - potential_energy(&state.config(), masses, potential)?)
}

/// Gradient of `V` with respect to `(θ_k, φ_k)`.
pub fn potential_gradient(
    config: &Config,
    masses: &Masses,
    potential: &PotentialKind,
) -> Result<([f64; 3], [f64; 3])> {
    let mut d_theta = [0.0; 3];
    let mut d_phi = [0.0; 3];
    for &(i, j) in &PAIRS {
        let (pi, pj) = (&config[i], &config[j]);
        let c = cos_arc(pi, pj);
        let up = potential.u_prime(c).map_err(|e| with_pair(e, i, j))?;
        let w = masses[i] * masses[j] * up;
        let (sti, cti) = pi.theta.sin_cos();
        let (stj, ctj) = pj.theta.sin_cos();
        let (sd, cd) = (pi.phi - pj.phi).sin_cos();
        d_theta[i] += w * (-sti * ctj + cti * stj * cd);
        d_theta[j] += w * (-stj * cti + ctj * sti * cd);
        d_phi[i] += w * (-sti * stj * sd);
        d_phi[j] += w * (sti * stj * sd);
    }
    Ok((d_theta, d_phi))
}

/// Below this `sin²θ` the azimuthal equation is refused.
pub const POLE_SIN2: f64 = 1e-14;

/// Second derivatives `(θ̈_k, φ̈_k)` from the Euler–Lagrange equations.
pub fn eom_accelerations(
    state: &PhaseState,
    masses: &Masses,
    potential: &PotentialKind,
) -> Result<([f64; 3], [f64; 3])> {
    let (d_theta, d_phi) = potential_gradient(&state.config(), masses, potential)?;
    let mut theta_dd = [0.0; 3];
    let mut phi_dd = [0.0; 3];
    for k in 0..3 {
        let (st, ct) = state.theta[k].sin_cos();
        if st * st < POLE_SIN2 {
            return Err(Error::CoordinateSingularity(k));
        }
        let m = masses[k];
        theta_dd[k] = st * ct * state.phi_dot[k].powi(2) + d_theta[k] / m;
        phi_dd[k] = (d_phi[k] / m - 2.0 * st * ct * state.theta_dot[k] * state.phi_dot[k]) / (st * st);
    }
    Ok((theta_dd, phi_dd))
}

/// Accelerations of a rigid rotation with angular velocity `√omega2` about z.
/// All six vanish exactly when the configuration is a relative equilibrium.
pub fn rigid_rotation_residual(
    config: &Config,
    masses: &Masses,
    potential: &PotentialKind,
    omega2: f64,
) -> Result<[f64; 6]> {
    let state = PhaseState::rigid_rotation(config, omega2.max(0.0).sqrt());
    let (t, p) = eom_accelerations(&state, masses, potential)?;
    Ok([t[0], t[1], t[2], p[0], p[1], p[2]])
}

/// Reduced system on a meridian rotating with `φ = ωt`: returns `θ̈_k`.
pub fn meridian_accelerations(
    thetas: &[f64; 3],
    masses: &Masses,
    potential: &PotentialKind,
    omega2: f64,
) -> Result<[f64; 3]> {
    let forces = meridian_forces(thetas, masses, potential)?;
    Ok([0, 1, 2].map(|k| 0.5 * omega2 * (2.0 * thetas[k]).sin() - forces[k] / masses[k]))
}

/// `m_k Σ_{j≠k} m_j sin θ_kj U′(cos θ_kj)` for each body.
fn meridian_forces(thetas: &[f64; 3], masses: &Masses, potential: &PotentialKind) -> Result<[f64; 3]> {
    let mut f = [0.0; 3];
    for &(i, j) in &PAIRS {
        let d = thetas[i] - thetas[j];
        let up = potential.u_prime_meridian(d).map_err(|e| with_pair(e, i, j))?;
        let w = masses[i] * masses[j] * d.sin() * up;
        f[i] += w;
        f[j] -= w;
    }
    Ok(f)
}

/// Residuals `(ω²/2) m_k sin 2θ_k − m_k Σ_j m_j sin θ_kj U′(cos θ_kj)`.
pub fn meridian_re_residual(
    thetas: &[f64; 3],
    masses: &Masses,
    omega2: f64,
    potential: &PotentialKind,
) -> Result<[f64; 3]> {
    let f = meridian_forces(thetas, masses, potential)?;
    Ok([0, 1, 2].map(|k| 0.5 * omega2 * masses[k] * (2.0 * thetas[k]).sin() - f[k]))
}

/// Magnitude against which [`meridian_re_residual`] is judged: the largest
/// single term entering any of the three equations.
pub fn meridian_residual_scale(
    thetas: &[f64; 3],
    masses: &Masses,
    omega2: f64,
    potential: &PotentialKind,
) -> Result<f64> {
    let mut scale: f64 = 0.0;
    for k in 0..3 {
        scale = scale.max((0.5 * omega2 * masses[k] * (2.0 * thetas[k]).sin()).abs());
    }
    for &(i, j) in &PAIRS {
        let d = thetas[i] - thetas[j];
        let up = potential.u_prime_meridian(d).map_err(|e| with_pair(e, i, j))?;
        scale = scale.max((masses[i] * masses[j] * d.sin() * up).abs());
    }
    Ok(scale)
}

/// Conserved quantity of the reduced meridian system:
/// `Σ m/2 θ̇² − Σ m/2 ω² sin²θ − V`.
pub fn meridian_jacobi_integral(
    thetas: &[f64; 3],
    theta_dot: &[f64; 3],
    masses: &Masses,
    potential: &PotentialKind,
    omega2: f64,
) -> Result<f64> {
    let config = thetas.map(BodyPosition::meridian);
    let v = potential_energy(&config, masses, potential)?;
    let k: f64 = (0..3)
        .map(|i| 0.5 * masses[i] * (theta_dot[i].powi(2) - omega2 * thetas[i].sin().powi(2)))
        .sum();
    Ok(k - v)
}

/// Planar three-body state in polar coordinates, used as the reference for the
/// large-radius limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarState {
    pub r: [f64; 3],
    pub phi: [f64; 3],
    pub r_dot: [f64; 3],
    pub phi_dot: [f64; 3],
}

impl PlanarState {
    /// Returns `(p_x, p_y, C_z)`.
    pub fn momenta(&self, masses: &Masses) -> [f64; 3] {
        let mut p = [0.0; 3];
        for k in 0..3 {
            let (s, c) = self.phi[k].sin_cos();
            let (r, rd, pd) = (self.r[k], self.r_dot[k], self.phi_dot[k]);
            p[0] += masses[k] * (rd * c - r * s * pd);
            p[1] += masses[k] * (rd * s + r * c * pd);
            p[2] += masses[k] * r * r * pd;
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanLimitReport {
    pub epsilon: f64,
    /// `(c_x/R, c_y/R, c_z)` on the sphere of radius `R = 1/ε`.
    pub spherical: [f64; 3],
    /// `(−p_y, p_x, C_z)` on the plane.
    pub planar: [f64; 3],
    /// Largest component difference, divided by `max(1, |planar|_∞)`.
    pub deviation: f64,
}

/// Compares the sphere's angular momentum with the planar linear and angular
/// momenta for a planar state mapped onto a sphere of radius `1/ε`.
pub fn euclidean_limit_check(planar: &PlanarState, masses: &Masses, epsilon: f64) -> EuclideanLimitReport {
    // On the unit sphere θ = ε r and θ̇ = ε ṙ; radius R rescales c by R².
    let state = PhaseState {
        theta: planar.r.map(|r| epsilon * r),
        phi: planar.phi,
        theta_dot: planar.r_dot.map(|v| epsilon * v),
        phi_dot: planar.phi_dot,
    };
    let c = angular_momentum(&state, masses);
    let spherical = [c.cx / epsilon, c.cy / epsilon, c.cz / (epsilon * epsilon)];
    let [px, py, cz] = planar.momenta(masses);
    let reference = [-py, px, cz];
    let scale = reference.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let deviation = (0..3)
        .map(|k| (spherical[k] - reference[k]).abs())
        .fold(0.0, f64::max)
        / scale;
    EuclideanLimitReport { epsilon, spherical, planar: reference, deviation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lre_config() -> Config {
        let t = (1.0 / 3f64.sqrt()).acos();
        [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0].map(|phi| BodyPosition::new(t, phi))
    }

    #[test]
    fn angular_momentum_examples() {
        let cfg = lre_config();
        let m = Masses::new([1.0, 2.0, 0.5]).unwrap();
        let c = angular_momentum(&PhaseState::at_rest(&cfg), &m);
        assert_eq!(c.as_array(), [0.0; 3]);

        let cfg = [
            BodyPosition::new(0.4, 0.2),
            BodyPosition::new(1.1, 2.0),
            BodyPosition::new(2.3, -1.0),
        ];
        let omega = 1.7;
        let c = angular_momentum(&PhaseState::rigid_rotation(&cfg, omega), &m);
        let closed = rigid_rotation_momentum(&cfg, &m, omega);
        for (a, b) in c.as_array().iter().zip(closed.as_array()) {
            assert!((a - b).abs() < 1e-12);
        }

        let pole = [BodyPosition::new(0.0, 0.0); 3];
        let c = angular_momentum(&PhaseState::rigid_rotation(&pole, 3.0), &m);
        assert_eq!(c.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn symmetric_lre_is_stationary() {
        let cfg = lre_config();
        let res = rigid_rotation_residual(&cfg, &Masses::unit(), &PotentialKind::Cotangent, 3.0).unwrap();
        for r in res {
            assert!(r.abs() < 1e-13, "{res:?}");
        }
    }

    #[test]
    fn antipodal_pair_is_singular() {
        let cfg = [
            BodyPosition::new(PI / 2.0, 0.0),
            BodyPosition::new(PI / 2.0, PI),
            BodyPosition::new(0.3, 0.5),
        ];
        let state = PhaseState::at_rest(&cfg);
        let err = eom_accelerations(&state, &Masses::unit(), &PotentialKind::Cotangent).unwrap_err();
        assert!(matches!(err, Error::SingularSeparation { i: 0, j: 1, .. }), "{err:?}");
    }

    #[test]
    fn pole_is_a_coordinate_singularity() {
        let cfg = [
            BodyPosition::new(0.0, 0.0),
            BodyPosition::new(1.0, 0.0),
            BodyPosition::new(2.0, 2.0),
        ];
        let err = eom_accelerations(&PhaseState::at_rest(&cfg), &Masses::unit(), &PotentialKind::Cotangent)
            .unwrap_err();
        assert_eq!(err, Error::CoordinateSingularity(0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = [
            BodyPosition::new(0.7, 0.1),
            BodyPosition::new(1.3, 1.9),
            BodyPosition::new(2.1, -2.2),
        ];
        let m = Masses::new([1.3, 0.7, 2.1]).unwrap();
        let pot = PotentialKind::Cotangent;
        let (gt, gp) = potential_gradient(&cfg, &m, &pot).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            for (which, exact) in [(0, gt[k]), (1, gp[k])] {
                let mut plus = cfg;
                let mut minus = cfg;
                if which == 0 {
                    plus[k].theta += h;
                    minus[k].theta -= h;
                } else {
                    plus[k].phi += h;
                    minus[k].phi -= h;
                }
                let fd = (potential_energy(&plus, &m, &pot).unwrap()
                    - potential_energy(&minus, &m, &pot).unwrap())
                    / (2.0 * h);
                assert!(((fd - exact) / exact.abs().max(1e-3)).abs() < 1e-6, "{k} {which}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn meridian_residual_examples() {
        let m = Masses::unit();
        let pot = PotentialKind::Cotangent;
        let omega2 = 32.0 / (3.0 * 3f64.sqrt());
        let r = meridian_re_residual(&[-PI / 3.0, PI / 3.0, 0.0], &m, omega2, &pot).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-12), "{r:?}");

        let r = meridian_re_residual(&[0.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0], &m, 0.0, &pot).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-12), "{r:?}");

        assert!(matches!(
            meridian_re_residual(&[0.2, 0.2, 1.0], &m, 1.0, &pot),
            Err(Error::SingularSeparation { .. })
        ));
    }

    #[test]
    fn euclidean_limit_examples() {
        let m = Masses::new([1.0, 2.0, 1.5]).unwrap();
        let planar = PlanarState {
            r: [0.5, 1.2, 0.8],
            phi: [0.3, 2.0, -1.9],
            r_dot: [0.2, -0.4, 0.1],
            phi_dot: [0.7, -0.3, 1.1],
        };
        let fine = euclidean_limit_check(&planar, &m, 1e-3);
        assert!(fine.deviation < 1e-5);
        let coarse = euclidean_limit_check(&planar, &m, 2e-2);
        let half = euclidean_limit_check(&planar, &m, 1e-2);
        let ratio = half.deviation / coarse.deviation;
        assert!((ratio - 0.25).abs() < 0.02, "ratio {ratio}");

        let still = PlanarState { r_dot: [0.0; 3], phi_dot: [0.0; 3], ..planar };
        let rep = euclidean_limit_check(&still, &m, 1e-3);
        assert_eq!(rep.spherical, [0.0; 3]);
        assert_eq!(rep.planar.map(f64::abs), [0.0; 3]);
    }
}
