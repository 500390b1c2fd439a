//! Blow-down and radial-profile oracles.

use approx::assert_relative_eq;
use shrinkerlab_core::catalog;
use shrinkerlab_core::cones::{
    cone_deviation, cone_report, cross_section, radial_mass_profile, rescale,
    xi_limit_consistency,
};
use shrinkerlab_core::functionals::eval_xi;
use shrinkerlab_core::geom::{QuadratureSpec, SurfaceKind};
use shrinkerlab_core::testfn::HomogeneousTestFunction;

fn quad() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

#[test]
fn rescale_catalog_closed_forms() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let r = rescale(&sphere, 2.0).unwrap();
    match r.kind() {
        SurfaceKind::RoundSphere(s) => assert_relative_eq!(s.radius, 1.0, epsilon = 1e-15),
        _ => panic!("expected sphere"),
    }
    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let r = rescale(&cyl, 10.0).unwrap();
    match r.kind() {
        SurfaceKind::RoundCylinder(c) => {
            assert_relative_eq!(c.radius, 2.0f64.sqrt() / 10.0, epsilon = 1e-15);
            assert_eq!(c.sphere_dim, 1);
        }
        _ => panic!("expected cylinder"),
    }
    // plane rescales to itself
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let r = rescale(&plane, 7.0).unwrap();
    assert!(matches!(r.kind(), SurfaceKind::Plane(_)));
}

#[test]
fn plane_profile_is_constant_pi() {
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let radii = [0.5, 1.0, 2.0, 4.0, 8.0];
    let profile = radial_mass_profile(&plane, &one, &radii, &quad()).unwrap();
    for p in &profile {
        let v = p.value.unwrap();
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-9);
    }
    // phi = xi_1^2: circular average 1/2 times pi
    let phi = HomogeneousTestFunction::coordinate_sq(3, 0).unwrap();
    let profile = radial_mass_profile(&plane, &phi, &radii, &quad()).unwrap();
    for p in &profile {
        assert_relative_eq!(
            p.value.unwrap(),
            std::f64::consts::PI / 2.0,
            epsilon = 1e-9
        );
    }
}

#[test]
fn cylinder_profile_decreases() {
    // closed form 2 pi sqrt(2) * 2 sqrt(r^2 - 2) / r^2
    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let radii = [2.0, 4.0, 8.0, 16.0, 32.0];
    let profile = radial_mass_profile(&cyl, &one, &radii, &quad()).unwrap();
    let rho = 2.0f64.sqrt();
    let mut prev = f64::INFINITY;
    for p in &profile {
        let r = p.r;
        let expect = 2.0 * std::f64::consts::PI * rho * 2.0 * (r * r - 2.0).sqrt() / (r * r);
        let v = p.value.unwrap();
        assert_relative_eq!(v, expect, epsilon = 1e-8);
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn profile_skips_radii_inside_the_inner_radius() {
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let profile = radial_mass_profile(&ext, &one, &[0.5, 2.0], &quad()).unwrap();
    assert!(profile[0].value.is_none());
    assert!(profile[0].note.is_some());
    assert!(profile[1].value.is_some());
}

#[test]
fn plane_cross_sections_are_scale_invariant() {
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let d = cone_deviation(&plane, (1.0, 7.0), 1.0, 64, 0).unwrap();
    assert!(d < 1e-14, "deviation {d}");
}

#[test]
fn sphere_cross_section_empty_away_from_its_radius() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    // rescaled by 4, the sphere has radius 1/2; a section at r = 1 is empty
    assert!(cone_deviation(&sphere, (1.0, 4.0), 1.0, 32, 0).is_err());
    // at its own radius the section exists
    assert!(cross_section(&sphere, 2.0, 32, 0).is_ok());
}

#[test]
fn xi_limit_plane_spread_is_zero() {
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let report = xi_limit_consistency(&plane, &one, &[1.0, 2.0, 4.0, 8.0], &quad()).unwrap();
    assert!(report.tail_spread < 1e-8);
    assert!(report.scale_identity_gap < 1e-10);
}

#[test]
fn xi_limit_sphere_vanishes() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let report = xi_limit_consistency(&sphere, &one, &[2.0, 4.0, 8.0], &quad()).unwrap();
    // closed form: Xi_1(M_t) = (2/t)^2 e^{-1/t^2}
    for (t, v) in &report.values {
        let rho = 2.0 / t;
        let expect = rho * rho * (-rho * rho / 4.0).exp();
        assert_relative_eq!(*v, expect, epsilon = 1e-9);
    }
    let last = report.values.last().unwrap().1;
    assert!(last < 0.07);
}

#[test]
fn exterior_plane_xi_spread_below_integrated_bound() {
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let scales = [2.0, 4.0, 8.0];
    let report = xi_limit_consistency(&ext, &one, &scales, &quad()).unwrap();
    let budget = shrinkerlab_core::monotonicity::integrated_bound(
        &ext,
        &one,
        scales[0] * scales[0],
        scales[2] * scales[2],
        &quad(),
    )
    .unwrap();
    assert!(
        report.tail_spread <= budget + 1e-9,
        "spread {:e} exceeds bound {budget:e}",
        report.tail_spread
    );
}

#[test]
fn scale_identity_all_catalog() {
    let q = quad();
    for id in ["plane", "plane-ext", "circle", "sphere", "cylinder"] {
        let s = catalog::builtin::<f64>(id).unwrap();
        let phi = HomogeneousTestFunction::constant(s.ambient_dim());
        for t in [0.5f64, 2.0, 3.0] {
            let lhs = eval_xi(&s, &phi, t * t, &q).unwrap().value;
            let rescaled = rescale(&s, t).unwrap();
            let rhs = eval_xi(&rescaled, &phi, 1.0, &q).unwrap().value;
            let rel = (lhs - rhs).abs() / lhs.abs().max(1e-300);
            assert!(rel < 1e-10, "{id} at t={t}: rel gap {rel:e}");
        }
    }
}

#[test]
fn separating_test_functions_distinguish_planes() {
    // span(e1,e2) vs span(e1,e3): phi = xi_2^2 separates them
    let a = catalog::builtin::<f64>("plane").unwrap();
    let b = catalog::builtin::<f64>("plane-xz").unwrap();
    let phi = HomogeneousTestFunction::coordinate_sq(3, 1).unwrap();
    let q = quad();
    let va = eval_xi(&a, &phi, 1.0, &q).unwrap().value;
    let vb = eval_xi(&b, &phi, 1.0, &q).unwrap().value;
    assert!((va - vb).abs() > 0.4, "xi2^2: {va} vs {vb}");
}

#[test]
fn cone_report_verdicts() {
    let q = quad();
    let phis = vec![
        HomogeneousTestFunction::constant(3),
        HomogeneousTestFunction::coordinate_sq(3, 0).unwrap(),
    ];
    let radii = [1.0, 2.0, 4.0, 8.0];
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let report = cone_report(
        &plane,
        &[1.0, 2.0, 4.0],
        1.0,
        48,
        0,
        &phis,
        &radii,
        &q,
        1e-8,
    )
    .unwrap();
    assert!(report.verdict_cone);
    assert!(report.profile_constant);
    assert!(report.deviation < 1e-12);

    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let report = cone_report(
        &cyl,
        &[2.0, 4.0],
        2.0,
        48,
        0,
        &phis,
        &[2.0, 4.0, 8.0],
        &q,
        1e-8,
    )
    .unwrap();
    assert!(!report.verdict_cone, "the cylinder is not a cone");
}

#[test]
fn graph_patch_cross_section_deviation_is_bounded_by_heights() {
    // the fixture's annulus is [4, 16]; the rescaled sections live over
    // [4/t, 16/t], so the probe radius moves with the scale pair
    let patch = catalog::shrinker_graph_patch::<f64>(0.5).unwrap();
    let u_max = match patch.kind() {
        SurfaceKind::GraphPatch(d) => {
            let mut m: f64 = 0.0;
            for node in d.function.active_nodes() {
                m = m.max(d.function.value(node, 0).abs());
            }
            m
        }
        _ => unreachable!(),
    };
    for (t_a, t_b, r) in [(1.0, 2.0, 6.5), (2.0, 4.0, 3.25)] {
        let d = cone_deviation(&patch, (t_a, t_b), r, 96, 0).unwrap();
        // points at matching angles differ by at most the two height scales
        let bound = (u_max / t_a + u_max / t_b) / r + 0.02;
        assert!(d <= bound, "deviation {d} vs bound {bound} at ({t_a}, {t_b})");
    }
}
