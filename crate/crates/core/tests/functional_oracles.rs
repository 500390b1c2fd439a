//! Closed-form oracles for the Gaussian-weighted functionals on the
//! analytic catalog.

use approx::assert_relative_eq;
use shrinkerlab_core::catalog;
use shrinkerlab_core::functionals::{eval_f, eval_f_prime, eval_g, eval_xi, f_derivative_fd};
use shrinkerlab_core::geom::{Location, QuadratureSpec};
use shrinkerlab_core::testfn::HomogeneousTestFunction;

fn quad() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

/// Closed form: F_t of the sphere S^n(rho) is
/// (4 pi t)^{-n/2} e^{-rho^2/4t} |S^n| rho^n.
fn f_sphere(n: usize, rho: f64, t: f64) -> f64 {
    let area = match n {
        1 => 2.0 * std::f64::consts::PI * rho,
        2 => 4.0 * std::f64::consts::PI * rho * rho,
        _ => unreachable!(),
    };
    (4.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0) * (-rho * rho / (4.0 * t)).exp()
        * area
}

#[test]
fn gaussian_area_of_plane_is_one() {
    let plane = catalog::builtin::<f64>("plane").unwrap();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let f = eval_f(&plane, t, &quad()).unwrap();
        assert_relative_eq!(f.value, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn gaussian_area_of_circle_closed_form() {
    let circle = catalog::builtin::<f64>("circle").unwrap();
    let f = eval_f(&circle, 1.0, &quad()).unwrap();
    // sqrt(2 pi / e)
    let expect = (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt();
    assert_relative_eq!(f.value, expect, epsilon = 1e-10);
    assert_relative_eq!(f.value, 1.520347, epsilon = 1e-6);
    assert_relative_eq!(f.value, f_sphere(1, 2.0f64.sqrt(), 1.0), epsilon = 1e-10);
}

#[test]
fn gaussian_area_of_sphere_closed_form() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    for t in [0.5, 1.0, 2.0, 3.7] {
        let f = eval_f(&sphere, t, &quad()).unwrap();
        assert_relative_eq!(f.value, f_sphere(2, 2.0, t), epsilon = 1e-10);
        // equivalently 4 e^{-1/t} / t
        assert_relative_eq!(f.value, 4.0 * (-1.0 / t).exp() / t, epsilon = 1e-10);
    }
}

#[test]
fn exterior_plane_gaussian_area() {
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    for t in [0.5, 1.0, 4.0] {
        let f = eval_f(&ext, t, &quad()).unwrap();
        assert_relative_eq!(f.value, (-1.0 / (4.0 * t)).exp(), epsilon = 1e-9);
    }
}

#[test]
fn cylinder_gaussian_area_closed_form() {
    // F_t(S^1(rho) x R) = (4 pi t)^{-1} e^{-rho^2/4t} 2 pi rho sqrt(4 pi t)
    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let rho = 2.0f64.sqrt();
    for t in [0.5, 1.0, 2.0] {
        let f = eval_f(&cyl, t, &quad()).unwrap();
        let expect = (4.0 * std::f64::consts::PI * t).powf(-1.0)
            * (-rho * rho / (4.0 * t)).exp()
            * 2.0
            * std::f64::consts::PI
            * rho
            * (4.0 * std::f64::consts::PI * t).sqrt();
        assert_relative_eq!(f.value, expect, epsilon = 1e-9);
    }
}

#[test]
fn f_prime_closed_form_matches_derivative_of_f() {
    // sphere: F_t = 4 e^{-1/t} / t, F'_t = 4 e^{-1/t} t^{-2} (1/t - 1)
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    for t in [0.5, 1.0, 2.0] {
        let fp = eval_f_prime(&sphere, t, &quad(), 1e-9).unwrap();
        let expect = 4.0 * (-1.0 / t).exp() * t.powi(-2) * (1.0 / t - 1.0);
        assert_relative_eq!(fp.value, expect, epsilon = 1e-9);
    }
    // t = 2 is negative
    assert!(eval_f_prime(&sphere, 2.0, &quad(), 1e-9).unwrap().value < 0.0);
}

#[test]
fn f_prime_vanishes_at_critical_time_on_closed_shrinkers() {
    for id in ["circle", "sphere", "cylinder"] {
        let s = catalog::builtin::<f64>(id).unwrap();
        let fp = eval_f_prime(&s, 1.0, &quad(), 1e-9).unwrap();
        assert!(fp.value.abs() < 1e-10, "{id}: F'_1 = {}", fp.value);
    }
}

#[test]
fn f_prime_matches_finite_differences() {
    let dt = 1e-3;
    for id in ["circle", "sphere", "cylinder", "plane-ext"] {
        let s = catalog::builtin::<f64>(id).unwrap();
        for t in [0.5, 1.0, 2.0, 4.0] {
            let fp = eval_f_prime(&s, t, &quad(), 1e-9).unwrap().value;
            let fd = f_derivative_fd(&s, t, dt, &quad()).unwrap();
            assert!(
                (fp - fd).abs() <= 1e-6_f64.max(10.0 * dt * dt),
                "{id} at t={t}: closed {fp:e} vs fd {fd:e}"
            );
        }
    }
}

#[test]
fn exterior_plane_f_prime_is_boundary_term() {
    // only the boundary term survives at t = 1: (1/4) e^{-1/4}
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let fp = eval_f_prime(&ext, 1.0, &quad(), 1e-9).unwrap();
    assert_relative_eq!(fp.value, 0.25 * (-0.25f64).exp(), epsilon = 1e-9);
}

#[test]
fn f_prime_rejects_non_shrinkers() {
    let bad = catalog::builtin::<f64>("sphere-unit").unwrap();
    assert!(eval_f_prime(&bad, 1.0, &quad(), 1e-6).is_err());
}

#[test]
fn g_sign_contract() {
    let plane = catalog::builtin::<f64>("plane").unwrap();
    for t in [0.25, 1.0, 4.0] {
        assert_eq!(eval_g(&plane, t, &quad()).unwrap().value, 0.0);
    }
    for id in ["circle", "sphere", "cylinder"] {
        let s = catalog::builtin::<f64>(id).unwrap();
        assert!(eval_g(&s, 1.0, &quad()).unwrap().value.abs() < 1e-12);
        for t in [0.25f64, 0.5, 2.0, 4.0] {
            let g = eval_g(&s, t, &quad()).unwrap().value;
            assert!(
                g * (t - 1.0) <= 1e-14,
                "{id}: G_{t} = {g} violates the sign contract"
            );
        }
    }
}

#[test]
fn g_closed_form_on_sphere() {
    // |X^N|^2 = 4 on S^2(2), so G_t = -(1/4t)(1 - 1/t) * 4 * F_t
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let t = 4.0;
    let g = eval_g(&sphere, t, &quad()).unwrap().value;
    let f = eval_f(&sphere, t, &quad()).unwrap().value;
    let expect = -(1.0 / (4.0 * t)) * (1.0 - 1.0 / t) * 4.0 * f;
    assert_relative_eq!(g, expect, epsilon = 1e-10);
    assert!(g < 0.0);
}

#[test]
fn xi_with_constant_equals_f() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    for t in [0.5, 2.0] {
        let xi = eval_xi(&sphere, &one, t, &quad()).unwrap().value;
        let f = eval_f(&sphere, t, &quad()).unwrap().value;
        assert_relative_eq!(xi, f, epsilon = 1e-12);
    }
}

#[test]
fn xi_vanishes_when_phi_vanishes_on_support() {
    // phi = xi_3^2 restricted to the plane spanned by e1, e2
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let phi = HomogeneousTestFunction::coordinate_sq(3, 2).unwrap();
    let xi = eval_xi(&plane, &phi, 1.0, &quad()).unwrap().value;
    assert!(xi.abs() < 1e-12);
}

#[test]
fn xi_scale_invariant_on_the_plane() {
    // phi = xi_1^2 on the plane: circular average of cos^2 = 1/2
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let phi = HomogeneousTestFunction::coordinate_sq(3, 0).unwrap();
    let mut values = Vec::new();
    for t in [0.5, 1.0, 2.0] {
        values.push(eval_xi(&plane, &phi, t, &quad()).unwrap().value);
    }
    for v in &values {
        assert_relative_eq!(*v, 0.5, epsilon = 1e-8);
    }
    for w in values.windows(2) {
        assert!((w[0] - w[1]).abs() < 1e-8);
    }
}

#[test]
fn scaling_identity_cylinder() {
    // F_{t^2}(M) = F_1(t^{-1} M) with t = 2
    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let t = 2.0f64;
    let lhs = eval_f(&cyl, t * t, &quad()).unwrap().value;
    let rescaled = shrinkerlab_core::cones::rescale(&cyl, t).unwrap();
    let rhs = eval_f(&rescaled, 1.0, &quad()).unwrap().value;
    assert_relative_eq!(lhs, rhs, epsilon = 1e-8);
}

#[test]
fn sample_geometry_closed_forms() {
    // cylinder at X = (sqrt 2, 0, 5)
    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let s = cyl
        .sample_geometry(&Location::Ambient(vec![2.0f64.sqrt(), 0.0, 5.0]))
        .unwrap();
    assert_relative_eq!(s.xn[0], 2.0f64.sqrt(), epsilon = 1e-14);
    assert_relative_eq!(s.xn[2], 0.0, epsilon = 1e-14);
    assert_relative_eq!(s.mean_curvature[0], -2.0f64.sqrt() / 2.0, epsilon = 1e-14);
    assert_relative_eq!(s.b_norm * s.b_norm, 0.5, epsilon = 1e-14);
    // sphere at X = (2, 0, 0)
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let s = sphere
        .sample_geometry(&Location::Ambient(vec![2.0, 0.0, 0.0]))
        .unwrap();
    assert_relative_eq!(s.xn[0], 2.0, epsilon = 1e-14);
    assert_relative_eq!(s.mean_curvature[0], -1.0, epsilon = 1e-14);
    assert_relative_eq!(s.b_norm * s.b_norm, 0.5, epsilon = 1e-14);
    // plane: totally geodesic
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let s = plane
        .sample_geometry(&Location::Ambient(vec![3.0, -1.0, 0.0]))
        .unwrap();
    assert!(s.xn.iter().all(|&v| v.abs() < 1e-14));
    assert_eq!(s.b_norm, 0.0);
}

#[test]
fn shrinker_residual_catalog() {
    let q = quad();
    for id in ["plane", "circle", "sphere", "cylinder", "plane-ext"] {
        let s = catalog::builtin::<f64>(id).unwrap();
        let r = s.shrinker_residual(&q).unwrap();
        assert!(r.sup < 1e-12, "{id}: sup {}", r.sup);
        assert!(r.l2_phi1 < 1e-9, "{id}: l2 {}", r.l2_phi1);
    }
    // unit sphere: |H + X^N/2| = rho |1/2 - n/rho^2| = 1.5
    let bad = catalog::builtin::<f64>("sphere-unit").unwrap();
    let r = bad.shrinker_residual(&quad()).unwrap();
    assert_relative_eq!(r.sup, 1.5, epsilon = 1e-12);
}

#[test]
fn tail_is_monotone_under_larger_cutoff() {
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let base = eval_f(&plane, 2.0, &quad()).unwrap().value;
    let mut wide = quad();
    wide.rho_max = Some(40.0);
    let wider = eval_f(&plane, 2.0, &wide).unwrap().value;
    assert!((base - wider).abs() < 1e-10);
}
