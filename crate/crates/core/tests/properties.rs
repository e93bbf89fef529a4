use proptest::prelude::*;
use std::f64::consts::PI;

use sphere_re::dynamics::{
    angular_momentum, potential_energy, potential_gradient, rigid_rotation_momentum, PhaseState,
};
use sphere_re::euler::{
    det_unchecked, g_equal_mass, g_general, reconstruct_meridian, repulsive_mirror, solve_ere,
};
use sphere_re::geometry::{arc_angle, chord, cos_arc, shape_of};
use sphere_re::inertia::{
    axis_conditions_check, canonical_placement, char_poly_coeffs, inertia_of, principal_axes,
    shape_matrix, shape_matrix_of_config,
};
use sphere_re::lagrange::{lre_condition_residual, lre_reconstruct, Orientation};
use sphere_re::linalg::{cross, dot, mat_vec, norm, rotation_about, rotation_to_z, Mat3, Vec3};
use sphere_re::{BodyPosition, Config, Masses, MeridianShape3, PotentialKind, Shape3};

const COT: PotentialKind = PotentialKind::Cotangent;

fn position() -> impl Strategy<Value = BodyPosition> {
    (0.05..PI - 0.05, 0.0..2.0 * PI).prop_map(|(t, p)| BodyPosition::new(t, p))
}

fn config() -> impl Strategy<Value = Config> {
    [position(), position(), position()].prop_filter("well separated", |c| {
        [(0, 1), (1, 2), (2, 0)].iter().all(|&(i, j)| {
            let s = arc_angle(&c[i], &c[j]);
            s > 0.05 && s < PI - 0.05
        })
    })
}

fn masses() -> impl Strategy<Value = Masses> {
    [0.1..5.0f64, 0.1..5.0f64, 0.1..5.0f64].prop_map(|m| Masses::new(m).unwrap())
}

fn rotation() -> impl Strategy<Value = Mat3> {
    ([-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64], 0.0..2.0 * PI)
        .prop_filter("nonzero axis", |(a, _)| norm(a) > 0.1)
        .prop_map(|(a, ang)| rotation_about(&a.map(|x| x / norm(&a)), ang))
}

fn realizable_shape() -> impl Strategy<Value = Shape3> {
    [0.1..PI - 0.1, 0.1..PI - 0.1, 0.1..PI - 0.1]
        .prop_filter("realizable", |s| Shape3::new(s[0], s[1], s[2]).map(|sh| sh.realizability_margin() > 1e-3).unwrap_or(false))
        .prop_map(|s| Shape3::new(s[0], s[1], s[2]).unwrap())
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Cartesian positions and velocities of a state.
fn to_cartesian(s: &PhaseState) -> [(Vec3, Vec3); 3] {
    [0, 1, 2].map(|k| {
        let (st, ct) = s.theta[k].sin_cos();
        let (sp, cp) = s.phi[k].sin_cos();
        let r = [st * cp, st * sp, ct];
        let e_t = [ct * cp, ct * sp, -st];
        let e_p = [-sp, cp, 0.0];
        let v = [0, 1, 2].map(|i| s.theta_dot[k] * e_t[i] + st * s.phi_dot[k] * e_p[i]);
        (r, v)
    })
}

fn from_cartesian(rv: &[(Vec3, Vec3); 3]) -> PhaseState {
    let mut s = PhaseState {
        theta: [0.0; 3],
        phi: [0.0; 3],
        theta_dot: [0.0; 3],
        phi_dot: [0.0; 3],
    };
    for k in 0..3 {
        let (r, v) = rv[k];
        let p = BodyPosition::from_cartesian(&r);
        let (st, ct) = p.theta.sin_cos();
        let (sp, cp) = p.phi.sin_cos();
        s.theta[k] = p.theta;
        s.phi[k] = p.phi;
        s.theta_dot[k] = dot(&v, &[ct * cp, ct * sp, -st]);
        s.phi_dot[k] = dot(&v, &[-sp, cp, 0.0]) / st;
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn arc_angle_symmetric_and_rotation_invariant(p in position(), q in position(), r in rotation()) {
        prop_assert_eq!(arc_angle(&p, &q), arc_angle(&q, &p));
        let (pr, qr) = (p.rotated(&r), q.rotated(&r));
        // acos loses accuracy near 0 and π, so compare the cosines there.
        prop_assert!((cos_arc(&pr, &qr) - cos_arc(&p, &q)).abs() < 1e-12);
        let s = arc_angle(&p, &q);
        if s > 1e-3 && s < PI - 1e-3 {
            prop_assert!((arc_angle(&pr, &qr) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_and_chord(p in position(), q in position()) {
        prop_assert!((norm(&p.embed()) - 1.0).abs() < 1e-15);
        let s = arc_angle(&p, &q);
        prop_assert!(((s / 2.0).sin() - 0.5 * chord(&p, &q)).abs() < 1e-12);
    }

    #[test]
    fn inertia_and_shape_matrix_are_similar(shape in realizable_shape(), m in masses()) {
        let cfg = canonical_placement(&shape).unwrap();
        let a = char_poly_coeffs(&inertia_of(&cfg, &m).0);
        let b = char_poly_coeffs(&shape_matrix(&shape, &m).0);
        prop_assert!(rel_close(a.0, b.0, 1e-10) && rel_close(a.1, b.1, 1e-10) && rel_close(a.2, b.2, 1e-10),
            "{:?} vs {:?}", a, b);
    }

    #[test]
    fn vjv_identity(cfg in config(), m in masses()) {
        let v = [0, 1, 2].map(|k| m.sqrt()[k] * cfg[k].theta.cos());
        let j = shape_matrix_of_config(&cfg, &m);
        let lhs = dot(&v, &mat_vec(&j.0, &v));
        let cos2: f64 = (0..3).map(|k| m[k] * cfg[k].theta.cos().powi(2)).sum();
        let sin2: f64 = (0..3).map(|k| m[k] * cfg[k].theta.sin().powi(2)).sum();
        let i = inertia_of(&cfg, &m);
        let rhs = cos2 * sin2 - (i.xz().powi(2) + i.yz().powi(2));
        prop_assert!(rel_close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn axis_conditions_agree(cfg in config(), m in masses(), r in rotation(), pick in 0usize..3) {
        let c = axis_conditions_check(&cfg, &m);
        if let Ok(c) = c {
            prop_assert!(c.consistent(), "{:?}", c);
        }
        // Turn a principal axis onto z: all three must hold.
        let rotated: Config = cfg.map(|p| p.rotated(&r));
        let axes = principal_axes(&inertia_of(&rotated, &m));
        prop_assume!(!axes[pick].degenerate);
        let to_z = rotation_to_z(&axes[pick].psi);
        let aligned: Config = rotated.map(|p| p.rotated(&to_z));
        if let Ok(c) = axis_conditions_check(&aligned, &m) {
            prop_assert!(c.s1 && c.s2 && c.s3, "{:?}", c);
        }
    }

    #[test]
    fn principal_axes_are_orthonormal(cfg in config(), m in masses()) {
        let axes = principal_axes(&inertia_of(&cfg, &m));
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot(&axes[a].psi, &axes[b].psi) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rigid_rotation_momentum_matches_closed_form(cfg in config(), m in masses(), w in -3.0..3.0f64) {
        let c = angular_momentum(&PhaseState::rigid_rotation(&cfg, w), &m).as_array();
        let closed = rigid_rotation_momentum(&cfg, &m, w).as_array();
        for k in 0..3 {
            prop_assert!((c[k] - closed[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences(cfg in config(), m in masses()) {
        let (gt, gp) = potential_gradient(&cfg, &m, &COT).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            for (is_theta, analytic) in [(true, gt[k]), (false, gp[k])] {
                let shift = |d: f64| {
                    let mut c = cfg;
                    if is_theta { c[k].theta += d } else { c[k].phi += d }
                    potential_energy(&c, &m, &COT).unwrap()
                };
                let fd = (shift(h) - shift(-h)) / (2.0 * h);
                let scale = analytic.abs().max(1.0);
                prop_assert!((fd - analytic).abs() < 1e-6 * scale, "k={k} {fd} vs {analytic}");
            }
        }
    }

    #[test]
    fn momentum_is_rotation_equivariant(cfg in config(), m in masses(), r in rotation(),
                                        td in [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64],
                                        pd in [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]) {
        let s = PhaseState { theta_dot: td, phi_dot: pd, ..PhaseState::at_rest(&cfg) };
        let rv = to_cartesian(&s).map(|(p, v)| (mat_vec(&r, &p), mat_vec(&r, &v)));
        prop_assume!(rv.iter().all(|(p, _)| p[2].abs() < 0.999));
        let c = angular_momentum(&s, &m).as_array();
        let cr = angular_momentum(&from_cartesian(&rv), &m).as_array();
        let want = mat_vec(&r, &c);
        // Cross-check against Σ m r × v.
        let direct = (0..3).fold([0.0; 3], |acc, k| {
            let x = cross(&rv[k].0, &rv[k].1);
            [acc[0] + m[k] * x[0], acc[1] + m[k] * x[1], acc[2] + m[k] * x[2]]
        });
        for k in 0..3 {
            prop_assert!((cr[k] - want[k]).abs() < 1e-10, "{cr:?} vs {want:?}");
            prop_assert!((direct[k] - want[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn g_forms_match_and_share_symmetries(a in 0.05..PI - 0.05, x in -PI + 0.05..PI - 0.05) {
        let ge = g_equal_mass(a, x);
        let gg = g_general(&[0.0, a, x], &Masses::unit());
        prop_assert!((ge - gg).abs() < 1e-12 * ge.abs().max(1.0));
        // Exchanging bodies 2 and 3, and relabelling which body sits at the origin.
        prop_assert!((g_equal_mass(x, a).abs() - ge.abs()).abs() < 1e-12 * ge.abs().max(1.0));
        let moved = g_equal_mass(-a, x - a);
        prop_assert!((moved.abs() - ge.abs()).abs() < 1e-12 * ge.abs().max(1.0));
    }

    #[test]
    fn det_and_g_are_proportional(a in 0.05..PI - 0.05, x in -PI + 0.05..PI - 0.05, m in masses()) {
        let shape = MeridianShape3::new_unchecked(a, x);
        prop_assume!([x, a, x - a].iter().all(|t| t.sin().abs() > 0.05));
        let d = det_unchecked(&shape, &m, &COT).unwrap();
        let th = [0.0, a, x];
        let (t12, t23, t31) = (th[0] - th[1], th[1] - th[2], th[2] - th[0]);
        let prod = t12.sin() * t23.sin() * t31.sin();
        let want = m[0] * m[1] * m[2] * g_general(&th, &m) / (prod * prod.abs());
        prop_assert!((d - want).abs() < 1e-9 * d.abs().max(want.abs()).max(1.0), "{d} vs {want}");
    }

    #[test]
    fn reconstruction_cancels_centrifugal_sum(a in 0.05..PI - 0.05, x in -PI + 0.05..PI - 0.05, m in masses(), s in prop_oneof![Just(1i8), Just(-1i8)]) {
        let shape = MeridianShape3::new_unchecked(a, x);
        if let Ok(th) = reconstruct_meridian(&shape, &m, s) {
            let sum: f64 = (0..3).map(|k| m[k] * (2.0 * th[k]).sin()).sum();
            prop_assert!(sum.abs() < 1e-12 * m.total());
            prop_assert!(((th[1] - th[0] - a).sin()).abs() < 1e-12);
            prop_assert!(((th[2] - th[0] - x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn equilateral_lre_iff_equal_masses(sigma in 0.2..2.0f64, m in masses()) {
        let shape = Shape3::equilateral(sigma).unwrap();
        let r = norm(&lre_condition_residual(&shape, &m, &COT).unwrap());
        if m.max_gap() > 1e-3 {
            prop_assert!(r > 1e-6, "residual {r} for {m:?}");
        }
        let eq = Masses::equal(m[0]).unwrap();
        prop_assert!(norm(&lre_condition_residual(&shape, &eq, &COT).unwrap()) < 1e-13 * m[0].max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equal_mass_isosceles_lre_family(s12 in 0.1..PI - 0.1) {
        for s in sphere_re::lagrange::isosceles_lre_roots(s12, 2001) {
            let shape = Shape3::new_unchecked(s12, s, s);
            if shape.realizability_margin() <= 1e-6 { continue; }
            let m = Masses::unit();
            let res = norm(&lre_condition_residual(&shape, &m, &COT).unwrap());
            prop_assert!(res < 1e-10, "σ12={s12} σ={s}: {res}");
            let Ok(canon) = lre_reconstruct(&shape, &m, &COT, Orientation::CANONICAL) else { continue };
            prop_assert!(canon.cos_thetas.iter().all(|c| *c > 0.0));
            prop_assert!((canon.omega2 - canon.omega2_alt).abs() < 1e-10 * canon.omega2);
            // U′12 cos θ3 = U′23 cos θ1 = U′31 cos θ2 ≠ 0.
            let up = shape.cosines().map(|c| COT.u_prime(c).unwrap());
            let c = canon.cos_thetas;
            let vals = [up[0] * c[2], up[1] * c[0], up[2] * c[1]];
            prop_assert!(vals.iter().all(|v| (v - vals[0]).abs() < 1e-10 * vals[0].abs() && v.abs() > 0.0));
            for o in Orientation::all() {
                let cand = lre_reconstruct(&shape, &m, &COT, o).unwrap();
                prop_assert!(cand.relative_eom_residual() < 1e-10, "{o:?} {:?}", cand.eom_residual);
                prop_assert!((cand.omega2 - canon.omega2).abs() < 1e-12 * canon.omega2);
                let sd = cand.phi_diffs.map(f64::sin);
                prop_assert!(sd.iter().all(|x| x.signum() == sd[0].signum()));
                let turns = cand.phi_diffs.iter().sum::<f64>() / (2.0 * PI);
                prop_assert!((turns - turns.round()).abs() < 1e-10 && turns.round() != 0.0);
                let shape_back = shape_of(&cand.config).unwrap();
                for (p, q) in shape_back.cosines().iter().zip(shape.cosines()) {
                    prop_assert!((p - q).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn solved_scalene_ere_off_curve_perturbation_breaks_det(a in 1.5709..1.8124f64, sign in prop_oneof![Just(1.0), Just(-1.0)]) {
        let Some(shapes) = sphere_re::euler::scalene_curve_shapes(a) else { return Ok(()) };
        let shape = if sign > 0.0 { shapes[0] } else { shapes[1] };
        let unit = Masses::unit();
        let sol = solve_ere(&shape, &unit, &COT).unwrap();
        prop_assert!(sol.relative_residual() < 1e-10);
        let mirror = repulsive_mirror(&sol);
        let r = sphere_re::dynamics::meridian_re_residual(&mirror.thetas, &unit, mirror.omega2.unwrap(), &COT.negated()).unwrap();
        prop_assert!(r.iter().all(|v| v.abs() < 1e-10 * sol.residual_scale));
        // Step 1e-3 along the normal of the zero curve of g.
        let h = 1e-7;
        let gx = (g_equal_mass(shape.a, shape.x + h) - g_equal_mass(shape.a, shape.x - h)) / (2.0 * h);
        let ga = (g_equal_mass(shape.a + h, shape.x) - g_equal_mass(shape.a - h, shape.x)) / (2.0 * h);
        let n = (ga * ga + gx * gx).sqrt();
        prop_assume!(n > 1e-6);
        let off = MeridianShape3::new_unchecked(shape.a + 1e-3 * ga / n, shape.x + 1e-3 * gx / n);
        let d = det_unchecked(&off, &unit, &COT).unwrap();
        prop_assert!(d.abs() > 0.0);
    }
}
