//! Inertia tensor of a configuration, the shape matrix, and principal axes.
//!
//! For three bodies the inertia tensor `I` (which depends on where the bodies
//! sit) is similar to the shape matrix `J`, which depends only on the masses and
//! the arc angles. The rotation axis of any rotating relative equilibrium is a
//! principal axis of `I`; written in `J`'s basis, a candidate axis with
//! eigenvalue `λ` fixes the polar angles through
//! `√m_k cos θ_k = √(M − λ) Ψ_k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cos_arc, BodyPosition, Config, Shape3, PAIRS, REALIZABILITY_TOL};
use crate::linalg::{det, mat_vec, norm, symmetric_eigen, trace, Mat3, Vec3};
use crate::masses::Masses;

/// Relative tolerance on eigenvalue gaps (times the trace) for flagging degeneracy.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Relative tolerance (times total mass) for the principal-axis conditions.
pub const AXIS_TOL: f64 = 1e-10;

/// Inertia tensor of a placed configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaTensor(pub Mat3);

impl InertiaTensor {
    pub fn xx(&self) -> f64 {
        self.0[0][0]
    }
    pub fn yy(&self) -> f64 {
        self.0[1][1]
    }
    pub fn zz(&self) -> f64 {
        self.0[2][2]
    }
    pub fn xy(&self) -> f64 {
        self.0[0][1]
    }
    pub fn xz(&self) -> f64 {
        self.0[0][2]
    }
    pub fn yz(&self) -> f64 {
        self.0[1][2]
    }
}

/// The coordinate-free form of the inertia tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeMatrix(pub Mat3);

impl AsRef<Mat3> for InertiaTensor {
    fn as_ref(&self) -> &Mat3 {
        &self.0
    }
}

impl AsRef<Mat3> for ShapeMatrix {
    fn as_ref(&self) -> &Mat3 {
        &self.0
    }
}

/// One eigenpair of a symmetric 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisCandidate {
    pub lambda: f64,
    pub psi: Vec3,
    /// Set when another eigenvalue lies within the degeneracy gap.
    pub degenerate: bool,
}

pub fn inertia_of(config: &Config, masses: &Masses) -> InertiaTensor {
    let mut m = [[0.0; 3]; 3];
    for (k, p) in config.iter().enumerate() {
        let mk = masses[k];
        let (st, ct) = p.theta.sin_cos();
        let (sp, cp) = p.phi.sin_cos();
        m[0][0] += mk * (ct * ct + st * st * sp * sp);
        m[1][1] += mk * (ct * ct + st * st * cp * cp);
        m[2][2] += mk * st * st;
        m[0][1] -= mk * st * st * sp * cp;
        m[0][2] -= mk * st * ct * cp;
        m[1][2] -= mk * st * ct * sp;
    }
    m[1][0] = m[0][1];
    m[2][0] = m[0][2];
    m[2][1] = m[1][2];
    InertiaTensor(m)
}

pub fn shape_matrix(shape: &Shape3, masses: &Masses) -> ShapeMatrix {
    shape_matrix_from_cosines(&shape.cosines(), masses)
}

/// Shape matrix from `[cos σ12, cos σ23, cos σ31]`.
pub fn shape_matrix_from_cosines(cos: &[f64; 3], masses: &Masses) -> ShapeMatrix {
    let [m1, m2, m3] = masses.values();
    let r = masses.sqrt();
    let mut j = [[0.0; 3]; 3];
    j[0][0] = m2 + m3;
    j[1][1] = m3 + m1;
    j[2][2] = m1 + m2;
    for (k, &(a, b)) in PAIRS.iter().enumerate() {
        let v = -r[a] * r[b] * cos[k];
        j[a][b] = v;
        j[b][a] = v;
    }
    ShapeMatrix(j)
}

/// Shape matrix of a placed configuration, using its own pairwise cosines.
pub fn shape_matrix_of_config(config: &Config, masses: &Masses) -> ShapeMatrix {
    let cos = PAIRS.map(|(i, j)| cos_arc(&config[i], &config[j]));
    shape_matrix_from_cosines(&cos, masses)
}

/// Coefficients `(c2, c1, c0)` of `det(λ − A) = λ³ + c2 λ² + c1 λ + c0`.
pub fn char_poly_coeffs(m: &Mat3) -> (f64, f64, f64) {
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1]
        + m[0][0] * m[2][2]
        - m[0][2] * m[2][0];
    (-trace(m), minors, -det(m))
}

/// `cos α` of the placement angle between bodies 1 and 2 seen from body 3.
pub fn placement_cos_alpha(shape: &Shape3) -> f64 {
    let (s12, s23, s31) = (shape.sigma12, shape.sigma23, shape.sigma31);
    (s12.cos() - s31.cos() * s23.cos()) / (s31.sin() * s23.sin())
}

/// Places body 3 on the pole, body 1 at `(σ31, 0)` and body 2 at `(σ23, α)`
/// with `α ∈ [0, π]`.
pub fn canonical_placement(shape: &Shape3) -> Result<Config> {
    let ca = placement_cos_alpha(shape);
    if !ca.is_finite() || ca.abs() > 1.0 + REALIZABILITY_TOL {
        return Err(Error::UnrealizableShape(format!("cos α = {ca}")));
    }
    let alpha = ca.clamp(-1.0, 1.0).acos();
    Ok([
        BodyPosition::new(shape.sigma31, 0.0),
        BodyPosition::new(shape.sigma23, alpha),
        BodyPosition::new(0.0, 0.0),
    ])
}

/// Eigenpairs sorted by ascending eigenvalue.
pub fn principal_axes(matrix: &impl AsRef<Mat3>) -> [AxisCandidate; 3] {
    let m = matrix.as_ref();
    let (values, vectors) = symmetric_eigen(m);
    let gap = DEGENERACY_TOL * trace(m).abs().max(f64::MIN_POSITIVE);
    let mut out = [AxisCandidate { lambda: 0.0, psi: [0.0; 3], degenerate: false }; 3];
    for k in 0..3 {
        let degenerate = (0..3).any(|l| l != k && (values[l] - values[k]).abs() < gap);
        out[k] = AxisCandidate { lambda: values[k], psi: vectors[k], degenerate };
    }
    out
}

/// Outcome of the three equivalent principal-axis tests for the z-axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisConditions {
    /// z is an eigenvector of `I`.
    pub s1: bool,
    /// `I_xz = I_yz = 0`.
    pub s2: bool,
    /// `Ψ_θ` is an eigenvector of `J` with eigenvalue `Σ m sin²θ`.
    pub s3: bool,
    pub s1_residual: f64,
    pub s2_residual: f64,
    pub s3_residual: f64,
}

impl AxisConditions {
    pub fn consistent(&self) -> bool {
        self.s1 == self.s2 && self.s2 == self.s3
    }
}

/// `Ψ_θ = (√m_k cos θ_k) / ‖·‖`.
pub fn psi_theta(config: &Config, masses: &Masses) -> Result<Vec3> {
    let r = masses.sqrt();
    let v = [0, 1, 2].map(|k| r[k] * config[k].theta.cos());
    let n = norm(&v);
    if n <= 1e-12 * masses.total().sqrt() {
        return Err(Error::DegenerateNormalization);
    }
    Ok(v.map(|x| x / n))
}

pub fn axis_conditions_check(config: &Config, masses: &Masses) -> Result<AxisConditions> {
    let total = masses.total();
    let tol = AXIS_TOL * total;
    let psi = psi_theta(config, masses)?;

    let inertia = inertia_of(config, masses);
    let ie = mat_vec(&inertia.0, &[0.0, 0.0, 1.0]);
    let s1_residual = (ie[0] * ie[0] + ie[1] * ie[1]).sqrt();
    let s2_residual = inertia.xz().abs().max(inertia.yz().abs());

    let j = shape_matrix_of_config(config, masses);
    let lambda: f64 = (0..3).map(|k| masses[k] * config[k].theta.sin().powi(2)).sum();
    let jpsi = mat_vec(&j.0, &psi);
    let s3_residual = norm(&[0, 1, 2].map(|k| jpsi[k] - lambda * psi[k]));

    Ok(AxisConditions {
        s1: s1_residual < tol,
        s2: s2_residual < tol,
        s3: s3_residual < tol,
        s1_residual,
        s2_residual,
        s3_residual,
    })
}

/// Polar-angle cosines `cos θ_k = √(M − λ) Ψ_k / √m_k` for a candidate axis.
pub fn cos_theta_from_eigenpair(axis: &AxisCandidate, masses: &Masses) -> Result<[f64; 3]> {
    let total = masses.total();
    let gap = total - axis.lambda;
    if gap < -1e-10 * total {
        return Err(Error::ReconstructionOutOfRange(format!(
            "eigenvalue {} exceeds total mass {total}",
            axis.lambda
        )));
    }
    let root = gap.max(0.0).sqrt();
    let r = masses.sqrt();
    let mut out = [0.0; 3];
    for k in 0..3 {
        let c = root * axis.psi[k] / r[k];
        if c.abs() > 1.0 + 1e-10 {
            return Err(Error::ReconstructionOutOfRange(format!("|cos θ_{}| = {}", k + 1, c.abs())));
        }
        out[k] = c.clamp(-1.0, 1.0);
    }
    Ok(out)
}

/// True when all three cosines are nonzero and share a sign.
pub fn same_hemisphere(cos_thetas: &[f64; 3]) -> bool {
    cos_thetas.iter().all(|c| *c > 0.0) || cos_thetas.iter().all(|c| *c < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn mat_close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| close(a[i][j], b[i][j], tol)))
    }

    fn symmetric_config() -> Config {
        let t = (1.0 / 3f64.sqrt()).acos();
        [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0].map(|phi| BodyPosition::new(t, phi))
    }

    #[test]
    fn inertia_single_bodies() {
        let pole = BodyPosition::new(0.0, 0.0);
        let x = BodyPosition::new(FRAC_PI_2, 0.0);
        // Two negligible companions isolate one body's contribution.
        let m = Masses::new([1.0, 1e-300, 1e-300]).unwrap();
        let i = inertia_of(&[pole, x, x], &m);
        assert!(mat_close(&i.0, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]], 1e-15));
        let i = inertia_of(&[x, pole, pole], &m);
        assert!(mat_close(&i.0, &[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1e-15));
    }

    #[test]
    fn inertia_of_symmetric_config_is_isotropic() {
        let i = inertia_of(&symmetric_config(), &Masses::unit());
        let axes = principal_axes(&i);
        for a in axes {
            assert!(close(a.lambda, 2.0, 1e-12));
            assert!(a.degenerate);
        }
    }

    #[test]
    fn shape_matrix_examples() {
        let right = Shape3::equilateral(FRAC_PI_2).unwrap();
        let j = shape_matrix(&right, &Masses::unit());
        assert!(mat_close(&j.0, &[[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]], 1e-15));
        let j = shape_matrix(&right, &Masses::new([1.0, 2.0, 3.0]).unwrap());
        assert!(mat_close(&j.0, &[[5.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 3.0]], 1e-15));
        let eq = Shape3::equilateral(2.0 * PI / 3.0).unwrap();
        let j = shape_matrix(&eq, &Masses::unit());
        assert!(mat_close(&j.0, &[[2.0, 0.5, 0.5], [0.5, 2.0, 0.5], [0.5, 0.5, 2.0]], 1e-15));
    }

    #[test]
    fn char_poly_examples() {
        let (c2, c1, c0) = char_poly_coeffs(&crate::linalg::IDENTITY);
        assert_eq!((c2, c1, c0), (-3.0, 3.0, -1.0));
        let d = [[5.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 3.0]];
        assert_eq!(char_poly_coeffs(&d), (-12.0, 47.0, -60.0));
    }

    #[test]
    fn canonical_placement_examples() {
        let right = Shape3::equilateral(FRAC_PI_2).unwrap();
        let cfg = canonical_placement(&right).unwrap();
        assert!(close(cfg[0].theta, FRAC_PI_2, 1e-15) && cfg[0].phi == 0.0);
        assert!(close(cfg[1].theta, FRAC_PI_2, 1e-15) && close(cfg[1].phi, FRAC_PI_2, 1e-15));
        assert_eq!(cfg[2], BodyPosition::new(0.0, 0.0));

        let eq = Shape3::equilateral(2.0 * PI / 3.0).unwrap();
        assert!(close(placement_cos_alpha(&eq), -1.0, 1e-15));
        let cfg = canonical_placement(&eq).unwrap();
        let back = crate::geometry::shape_of(&cfg).unwrap();
        for (a, b) in back.sides().iter().zip(eq.sides()) {
            assert!(close(*a, b, 1e-7));
        }

        let bad = Shape3::new_unchecked(1.3 + 0.1, 0.6, 0.7);
        assert!(matches!(canonical_placement(&bad), Err(Error::UnrealizableShape(_))));
    }

    #[test]
    fn principal_axes_examples() {
        let d = [[5.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 3.0]];
        let axes = principal_axes(&ShapeMatrix(d));
        assert_eq!(axes.map(|a| a.lambda), [3.0, 4.0, 5.0]);
        assert_eq!(axes[0].psi, [0.0, 0.0, 1.0]);
        assert_eq!(axes[1].psi, [0.0, 1.0, 0.0]);
        assert_eq!(axes[2].psi, [1.0, 0.0, 0.0]);
        assert!(axes.iter().all(|a| !a.degenerate));

        let eq = Shape3::equilateral(2.0 * PI / 3.0).unwrap();
        let axes = principal_axes(&shape_matrix(&eq, &Masses::unit()));
        assert!(close(axes[0].lambda, 1.5, 1e-13) && close(axes[1].lambda, 1.5, 1e-13));
        assert!(close(axes[2].lambda, 3.0, 1e-13));
        assert!(axes[0].degenerate && axes[1].degenerate && !axes[2].degenerate);
        let r = 1.0 / 3f64.sqrt();
        assert!(axes[2].psi.iter().all(|x| close(*x, r, 1e-13)));
    }

    #[test]
    fn axis_conditions_examples() {
        let c = axis_conditions_check(&symmetric_config(), &Masses::unit()).unwrap();
        assert!(c.s1 && c.s2 && c.s3);

        let cfg = [
            BodyPosition::new(0.3, 0.0),
            BodyPosition::new(0.3, 0.1),
            BodyPosition::new(0.3, 0.2),
        ];
        let c = axis_conditions_check(&cfg, &Masses::unit()).unwrap();
        assert!(!c.s1 && !c.s2 && !c.s3);

        let eq = [0.0, 2.0, 4.0].map(|phi| BodyPosition::new(FRAC_PI_2, phi));
        assert_eq!(
            axis_conditions_check(&eq, &Masses::unit()),
            Err(Error::DegenerateNormalization)
        );
    }

    #[test]
    fn cos_theta_examples() {
        let r = 1.0 / 3f64.sqrt();
        let axis = AxisCandidate { lambda: 2.0, psi: [r; 3], degenerate: true };
        let c = cos_theta_from_eigenpair(&axis, &Masses::unit()).unwrap();
        assert!(c.iter().all(|x| close(*x, r, 1e-15)));

        let axis = AxisCandidate { lambda: 3.0, psi: [r; 3], degenerate: false };
        assert_eq!(cos_theta_from_eigenpair(&axis, &Masses::unit()).unwrap(), [0.0; 3]);

        let mixed = AxisCandidate { lambda: 2.0, psi: [r, -r, r], degenerate: false };
        let c = cos_theta_from_eigenpair(&mixed, &Masses::unit()).unwrap();
        assert!(!same_hemisphere(&c));

        let too_far = AxisCandidate { lambda: 0.0, psi: [1.0, 0.0, 0.0], degenerate: false };
        assert!(matches!(
            cos_theta_from_eigenpair(&too_far, &Masses::unit()),
            Err(Error::ReconstructionOutOfRange(_))
        ));
    }
}
