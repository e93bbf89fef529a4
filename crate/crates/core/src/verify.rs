//! Dynamical verification of relative equilibria.
//!
//! Candidates are integrated with fixed-step classical RK4 straight from the
//! Euler–Lagrange accelerations, and the trajectory is checked for rigid
//! rotation and conservation of the first integrals. Collinear candidates on a
//! rotating meridian use the reduced `θ` system by default, which stays
//! regular when a body sits on a pole.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    angular_momentum, eom_accelerations, energy, meridian_accelerations, meridian_jacobi_integral,
    PhaseState,
};
use crate::error::{Error, Result};
use crate::euler::EreSolution;
use crate::geometry::{BodyPosition, Config, PAIRS};
use crate::lagrange::LreCandidate;
use crate::linalg::{cross, dot, mat_vec, norm, rotation_about, sub, Vec3};
use crate::masses::Masses;
use crate::potential::PotentialKind;

pub const DEFAULT_T: f64 = 10.0;
pub const DEFAULT_DT: f64 = 1e-3;
pub const SIGMA_TOL: f64 = 1e-6;
pub const ENERGY_TOL: f64 = 1e-9;
pub const MOMENTUM_TOL: f64 = 1e-9;
pub const FRAME_TOL: f64 = 1e-6;
/// Relative energy excursion treated as a blow-up during integration.
pub const ENERGY_JUMP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReKind {
    Ere,
    Lre,
    FixedPoint,
}

/// A relative equilibrium to be checked: placement, masses, potential and
/// angular velocity about the z-axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReCandidate {
    pub kind: ReKind,
    pub masses: Masses,
    #[serde(default)]
    pub potential: PotentialKind,
    /// Polar angles may be signed for meridian candidates.
    pub config: Config,
    pub omega2: f64,
    #[serde(default)]
    pub s: Option<i8>,
    /// All bodies on the meridian `φ = 0`; verified with the reduced system.
    #[serde(default)]
    pub meridian: bool,
}

impl ReCandidate {
    pub fn from_ere(sol: &EreSolution, masses: &Masses, potential: &PotentialKind) -> Self {
        let omega2 = sol.omega2.unwrap_or(0.0);
        Self {
            kind: if omega2 == 0.0 { ReKind::FixedPoint } else { ReKind::Ere },
            masses: *masses,
            potential: potential.clone(),
            config: sol.thetas.map(BodyPosition::meridian),
            omega2,
            s: sol.s,
            meridian: true,
        }
    }

    pub fn from_lre(c: &LreCandidate, masses: &Masses, potential: &PotentialKind) -> Self {
        Self {
            kind: ReKind::Lre,
            masses: *masses,
            potential: potential.clone(),
            config: c.config,
            omega2: c.omega2,
            s: None,
            meridian: false,
        }
    }

    pub fn omega(&self) -> f64 {
        self.omega2.max(0.0).sqrt()
    }

    /// The configuration with every `θ` in `[0, π]`.
    pub fn standard_config(&self) -> Config {
        self.config.map(|p| {
            if p.theta < 0.0 {
                BodyPosition::new(-p.theta, p.phi + std::f64::consts::PI)
            } else {
                p
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum IntegrationMode {
    /// All six spherical coordinates.
    Full,
    /// `θ` only, on a meridian turning at the fixed rate `√omega2`.
    Meridian { omega2: f64 },
}

/// States at every step. In meridian mode `φ = ωt` and `φ̇ = ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub mode: IntegrationMode,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<PhaseState>,
}

/// Why an integration stopped early.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub time: f64,
    pub reason: String,
}

type Y = [f64; 12];

fn pack(s: &PhaseState) -> Y {
    let mut y = [0.0; 12];
    y[0..3].copy_from_slice(&s.theta);
    y[3..6].copy_from_slice(&s.phi);
    y[6..9].copy_from_slice(&s.theta_dot);
    y[9..12].copy_from_slice(&s.phi_dot);
    y
}

fn unpack(y: &Y) -> PhaseState {
    PhaseState {
        theta: [y[0], y[1], y[2]],
        phi: [y[3], y[4], y[5]],
        theta_dot: [y[6], y[7], y[8]],
        phi_dot: [y[9], y[10], y[11]],
    }
}

fn deriv(y: &Y, masses: &Masses, potential: &PotentialKind, mode: IntegrationMode) -> Result<Y> {
    let mut d = [0.0; 12];
    match mode {
        IntegrationMode::Full => {
            let (tdd, pdd) = eom_accelerations(&unpack(y), masses, potential)?;
            d[0..3].copy_from_slice(&y[6..9]);
            d[3..6].copy_from_slice(&y[9..12]);
            d[6..9].copy_from_slice(&tdd);
            d[9..12].copy_from_slice(&pdd);
        }
        IntegrationMode::Meridian { omega2 } => {
            let tdd = meridian_accelerations(&[y[0], y[1], y[2]], masses, potential, omega2)?;
            d[0..3].copy_from_slice(&y[6..9]);
            d[3..6].copy_from_slice(&y[9..12]);
            d[6..9].copy_from_slice(&tdd);
        }
    }
    Ok(d)
}

fn axpy(y: &Y, h: f64, k: &Y) -> Y {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rk4_step(y: &Y, dt: f64, masses: &Masses, potential: &PotentialKind, mode: IntegrationMode) -> Result<Y> {
    let k1 = deriv(y, masses, potential, mode)?;
    let k2 = deriv(&axpy(y, 0.5 * dt, &k1), masses, potential, mode)?;
    let k3 = deriv(&axpy(y, 0.5 * dt, &k2), masses, potential, mode)?;
    let k4 = deriv(&axpy(y, dt, &k3), masses, potential, mode)?;
    Ok(std::array::from_fn(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// The first integral natural to the mode: `E = K − V`, or the Jacobi
/// integral of the reduced meridian system.
pub fn mode_integral(
    state: &PhaseState,
    masses: &Masses,
    potential: &PotentialKind,
    mode: IntegrationMode,
) -> Result<f64> {
    match mode {
        IntegrationMode::Full => energy(state, masses, potential),
        IntegrationMode::Meridian { omega2 } => {
            meridian_jacobi_integral(&state.theta, &state.theta_dot, masses, potential, omega2)
        }
    }
}

fn check_params(t_end: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidInput(format!("need dt > 0 and T ≥ 0, got dt = {dt}, T = {t_end}")));
    }
    Ok((t_end / dt).round() as usize)
}

/// Steps the system, calling `visit(t, state)` at every step point including
/// `t = 0`. Stops with the time of failure on a singular separation, a pole
/// crossing (full mode), a non-finite state or an energy blow-up.
pub fn integrate_with<F: FnMut(f64, &PhaseState)>(
    initial: &PhaseState,
    masses: &Masses,
    potential: &PotentialKind,
    mode: IntegrationMode,
    t_end: f64,
    dt: f64,
    mut visit: F,
) -> std::result::Result<usize, Abort> {
    let steps = check_params(t_end, dt).map_err(|e| Abort { time: 0.0, reason: e.to_string() })?;
    let mut y = pack(initial);
    if let IntegrationMode::Meridian { omega2 } = mode {
        let w = omega2.max(0.0).sqrt();
        y[9..12].copy_from_slice(&[w; 3]);
    }
    let e0 = mode_integral(&unpack(&y), masses, potential, mode)
        .map_err(|e| Abort { time: 0.0, reason: e.to_string() })?;
    let jump = ENERGY_JUMP * e0.abs().max(1.0);
    visit(0.0, &unpack(&y));
    for n in 1..=steps {
        let t = n as f64 * dt;
        y = rk4_step(&y, dt, masses, potential, mode).map_err(|e| Abort { time: t, reason: e.to_string() })?;
        let state = unpack(&y);
        if !state.is_finite() {
            return Err(Abort { time: t, reason: "state is no longer finite".into() });
        }
        let e = mode_integral(&state, masses, potential, mode).map_err(|e| Abort { time: t, reason: e.to_string() })?;
        if (e - e0).abs() > jump {
            return Err(Abort { time: t, reason: format!("energy jumped from {e0} to {e}") });
        }
        visit(t, &state);
    }
    Ok(steps)
}

/// Dense RK4 trajectory; aborts become [`Error::IntegrationAborted`].
pub fn integrate(
    initial: &PhaseState,
    masses: &Masses,
    potential: &PotentialKind,
    mode: IntegrationMode,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate_with(initial, masses, potential, mode, t_end, dt, |t, s| {
        times.push(t);
        states.push(*s);
    })
    .map_err(|a| Error::IntegrationAborted { time: a.time, reason: a.reason })?;
    Ok(Trajectory { mode, dt, times, states })
}

/// Drift of the mode integral and of each component of `c`, measured as the
/// largest deviation from the initial value.
pub fn first_integral_drift(
    trajectory: &Trajectory,
    masses: &Masses,
    potential: &PotentialKind,
) -> Result<(f64, [f64; 3])> {
    let Some(first) = trajectory.states.first() else {
        return Ok((0.0, [0.0; 3]));
    };
    let e0 = mode_integral(first, masses, potential, trajectory.mode)?;
    let c0 = angular_momentum(first, masses).as_array();
    let mut de: f64 = 0.0;
    let mut dc = [0.0_f64; 3];
    for s in &trajectory.states {
        de = de.max((mode_integral(s, masses, potential, trajectory.mode)? - e0).abs());
        let c = angular_momentum(s, masses).as_array();
        for k in 0..3 {
            dc[k] = dc[k].max((c[k] - c0[k]).abs());
        }
    }
    Ok((de, dc))
}

/// Arc angle from the embedded vectors, accurate near `0` and `π`.
fn robust_arc(p: &Vec3, q: &Vec3) -> f64 {
    norm(&cross(p, q)).atan2(dot(p, q))
}

fn embed_all(config: &Config) -> [Vec3; 3] {
    config.map(|p| p.embed())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: ReKind,
    pub mode: IntegrationMode,
    pub sigma_drift: f64,
    pub theta_drift: f64,
    pub phi_dot_drift: f64,
    /// Drift of `E = K − V`, or of the Jacobi integral in meridian mode.
    pub energy_drift: f64,
    pub momentum_drift: [f64; 3],
    /// Largest displacement after undoing the rotation by `ωt`.
    pub frame_drift: f64,
    pub steps: usize,
    pub dt: f64,
    pub t_end: f64,
    pub aborted: Option<Abort>,
    pub pass: bool,
}

impl VerificationReport {
    fn judge(&mut self) {
        let finite = [self.sigma_drift, self.energy_drift, self.frame_drift]
        .iter()
        .chain(&self.momentum_drift)
        .all(|x| x.is_finite());
        self.pass = self.aborted.is_none()
            && finite
            && self.sigma_drift < SIGMA_TOL
            && self.energy_drift < ENERGY_TOL
            && self.momentum_drift.iter().all(|d| *d < MOMENTUM_TOL)
            && self.frame_drift < FRAME_TOL;
    }
}

struct Tracker {
    sigma0: [f64; 3],
    theta0: [f64; 3],
    pos0: [Vec3; 3],
    e0: f64,
    c0: [f64; 3],
    omega: f64,
    axis: Vec3,
    report: VerificationReport,
    error: Option<Error>,
}

impl Tracker {
    fn new(kind: ReKind, mode: IntegrationMode, start: &PhaseState, omega: f64, axis: Vec3, dt: f64, t_end: f64) -> Self {
        let pos0 = embed_all(&start.config());
        Self {
            sigma0: PAIRS.map(|(i, j)| robust_arc(&pos0[i], &pos0[j])),
            theta0: start.theta,
            pos0,
            e0: f64::NAN,
            c0: [f64::NAN; 3],
            omega,
            axis,
            report: VerificationReport {
                kind,
                mode,
                sigma_drift: 0.0,
                theta_drift: 0.0,
                phi_dot_drift: 0.0,
                energy_drift: 0.0,
                momentum_drift: [0.0; 3],
                frame_drift: 0.0,
                steps: 0,
                dt,
                t_end,
                aborted: None,
                pass: false,
            },
            error: None,
        }
    }

    fn visit(&mut self, t: f64, s: &PhaseState, masses: &Masses, potential: &PotentialKind) {
        let r = &mut self.report;
        let e = match mode_integral(s, masses, potential, r.mode) {
            Ok(e) => e,
            Err(err) => {
                self.error.get_or_insert(err);
                return;
            }
        };
        let c = angular_momentum(s, masses).as_array();
        if t == 0.0 {
            self.e0 = e;
            self.c0 = c;
        }
        r.energy_drift = r.energy_drift.max((e - self.e0).abs());
        for k in 0..3 {
            r.momentum_drift[k] = r.momentum_drift[k].max((c[k] - self.c0[k]).abs());
        }
        let pos = embed_all(&s.config());
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            r.sigma_drift = r.sigma_drift.max((robust_arc(&pos[i], &pos[j]) - self.sigma0[k]).abs());
        }
        for k in 0..3 {
            r.theta_drift = r.theta_drift.max((s.theta[k] - self.theta0[k]).abs());
            r.phi_dot_drift = r.phi_dot_drift.max((s.phi_dot[k] - self.omega).abs());
        }
        let back = rotation_about(&self.axis, -self.omega * t);
        for k in 0..3 {
            let p = mat_vec(&back, &pos[k]);
            r.frame_drift = r.frame_drift.max(norm(&sub(&p, &self.pos0[k])));
        }
    }
}

/// Integrates a candidate for `t_end` with step `dt` and reports drifts.
///
/// Meridian candidates use the reduced system, all others the full one.
pub fn verify_re(candidate: &ReCandidate, t_end: f64, dt: f64) -> VerificationReport {
    let omega = candidate.omega();
    let (mode, start) = if candidate.meridian {
        (
            IntegrationMode::Meridian { omega2: candidate.omega2.max(0.0) },
            PhaseState::rigid_rotation(&candidate.config, omega),
        )
    } else {
        (IntegrationMode::Full, PhaseState::rigid_rotation(&candidate.standard_config(), omega))
    };
    run_verification(candidate, mode, &start, omega, [0.0, 0.0, 1.0], t_end, dt)
}

/// Full-system check of a candidate after tilting it by `tilt` radians about
/// the x-axis, so that no body sits on a coordinate pole. The rotation axis
/// tilts with it; `θ` and `φ̇` drifts are then not meaningful and the frame
/// drift carries the rigid-rotation test.
pub fn verify_re_tilted(candidate: &ReCandidate, tilt: f64, t_end: f64, dt: f64) -> Result<VerificationReport> {
    let rot = rotation_about(&[1.0, 0.0, 0.0], tilt);
    let axis = mat_vec(&rot, &[0.0, 0.0, 1.0]);
    let omega = candidate.omega();
    let config = candidate.standard_config().map(|p| p.rotated(&rot));
    let mut state = PhaseState::at_rest(&config);
    for k in 0..3 {
        let r = config[k].embed();
        let v = cross(&axis, &r).map(|x| x * omega);
        let (st, ct) = config[k].theta.sin_cos();
        let (sp, cp) = config[k].phi.sin_cos();
        if st * st < crate::dynamics::POLE_SIN2 {
            return Err(Error::CoordinateSingularity(k));
        }
        state.theta_dot[k] = dot(&v, &[ct * cp, ct * sp, -st]);
        state.phi_dot[k] = dot(&v, &[-sp, cp, 0.0]) / st;
    }
    Ok(run_verification(candidate, IntegrationMode::Full, &state, omega, axis, t_end, dt))
}

fn run_verification(
    candidate: &ReCandidate,
    mode: IntegrationMode,
    start: &PhaseState,
    omega: f64,
    axis: Vec3,
    t_end: f64,
    dt: f64,
) -> VerificationReport {
    let mut tracker = Tracker::new(candidate.kind, mode, start, omega, axis, dt, t_end);
    let outcome = integrate_with(start, &candidate.masses, &candidate.potential, mode, t_end, dt, |t, s| {
        tracker.visit(t, s, &candidate.masses, &candidate.potential)
    });
    match outcome {
        Ok(steps) => tracker.report.steps = steps,
        Err(abort) => {
            tracker.report.steps = (abort.time / dt).round() as usize;
            tracker.report.aborted = Some(abort);
        }
    }
    if let Some(err) = tracker.error {
        tracker.report.aborted.get_or_insert(Abort { time: 0.0, reason: err.to_string() });
    }
    if axis != [0.0, 0.0, 1.0] {
        tracker.report.theta_drift = f64::NAN;
        tracker.report.phi_dot_drift = f64::NAN;
    }
    let mut report = tracker.report;
    report.judge();
    report
}

/// Verifies many candidates concurrently; output order follows the input.
pub fn verify_batch(candidates: &[ReCandidate], t_end: f64, dt: f64) -> Vec<VerificationReport> {
    candidates.par_iter().map(|c| verify_re(c, t_end, dt)).collect()
}

/// Step-halving convergence measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    /// `‖y(dt) − y(dt/2)‖` and `‖y(dt/2) − y(dt/4)‖` at `t_end`.
    pub differences: [f64; 2],
    /// Ratio of the two differences; 16 for a fourth-order method.
    pub ratio: f64,
}

fn final_state(
    initial: &PhaseState,
    masses: &Masses,
    potential: &PotentialKind,
    mode: IntegrationMode,
    t_end: f64,
    dt: f64,
) -> Result<Y> {
    let mut last = *initial;
    integrate_with(initial, masses, potential, mode, t_end, dt, |_, s| last = *s)
        .map_err(|a| Error::IntegrationAborted { time: a.time, reason: a.reason })?;
    Ok(pack(&last))
}

/// Integrates at `dt`, `dt/2` and `dt/4` and compares end states.
pub fn convergence_ratio(
    initial: &PhaseState,
    masses: &Masses,
    potential: &PotentialKind,
    mode: IntegrationMode,
    t_end: f64,
    dt: f64,
) -> Result<ConvergenceReport> {
    let ys = [dt, 0.5 * dt, 0.25 * dt].map(|h| final_state(initial, masses, potential, mode, t_end, h));
    let [a, b, c] = ys;
    let (a, b, c) = (a?, b?, c?);
    let dist = |p: &Y, q: &Y| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let differences = [dist(&a, &b), dist(&b, &c)];
    Ok(ConvergenceReport { dt, differences, ratio: differences[0] / differences[1] })
}
