//! Closed-form fixtures for the monotonicity ledger and the derivative
//! bound.

use approx::assert_relative_eq;
use shrinkerlab_core::catalog;
use shrinkerlab_core::functionals::eval_g;
use shrinkerlab_core::geom::QuadratureSpec;
use shrinkerlab_core::monotonicity::{
    boundary_xt_nu_average, c1_constant, integrated_bound, verify_monotonicity,
    xi_derivative_bound,
};
use shrinkerlab_core::testfn::HomogeneousTestFunction;

fn quad() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

#[test]
fn exterior_plane_ledger_closed_form() {
    // F_t(plane \ B_1) = e^{-1/4t}; everything telescopes through the
    // boundary term.
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let ledger = verify_monotonicity(&ext, 1.0, 4.0, &quad(), 1e-9).unwrap();
    let expect = (-1.0f64 / 16.0).exp() - (-0.25f64).exp();
    assert_relative_eq!(ledger.lhs, expect, epsilon = 1e-8);
    assert_relative_eq!(ledger.boundary_term, expect, epsilon = 1e-6);
    assert!(ledger.normal_term.abs() < 1e-10);
    assert!(
        ledger.defect.abs() < 1e-6,
        "defect {:e} budget {:e}",
        ledger.defect,
        ledger.error_budget
    );
}

#[test]
fn sphere_ledger_is_normal_term_only() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let ledger = verify_monotonicity(&sphere, 1.0, 2.0, &quad(), 1e-9).unwrap();
    // closed form: F_t = 4 e^{-1/t} / t
    let expect = 4.0 * (-0.5f64).exp() / 2.0 - 4.0 * (-1.0f64).exp();
    assert_relative_eq!(ledger.lhs, expect, epsilon = 1e-8);
    assert!(ledger.boundary_term.abs() < 1e-12);
    assert!(ledger.lhs < 0.0 && ledger.normal_term < 0.0);
    assert_relative_eq!(ledger.lhs, ledger.normal_term, epsilon = 1e-6);
    assert!(ledger.defect.abs() < 1e-7);
}

#[test]
fn degenerate_interval_is_all_zeros() {
    let sphere = catalog::builtin::<f64>("sphere").unwrap();
    let ledger = verify_monotonicity(&sphere, 2.0, 2.0, &quad(), 1e-9).unwrap();
    assert_eq!(ledger.lhs, 0.0);
    assert_eq!(ledger.boundary_term, 0.0);
    assert_eq!(ledger.normal_term, 0.0);
    assert_eq!(ledger.defect, 0.0);
}

#[test]
fn non_shrinker_is_rejected() {
    let bad = catalog::builtin::<f64>("sphere-unit").unwrap();
    assert!(verify_monotonicity(&bad, 1.0, 2.0, &quad(), 1e-6).is_err());
}

#[test]
fn conormal_convention_on_the_exterior_plane() {
    // <X^T, nu> = -R on the boundary circle
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let avg = boundary_xt_nu_average(&ext, &quad()).unwrap();
    assert_relative_eq!(avg, -1.0, epsilon = 1e-10);
}

#[test]
fn exterior_plane_bound_dominates_closed_form_derivative() {
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let report = xi_derivative_bound(&ext, &one, 2.0, &quad(), 0.05, 1e-9).unwrap();
    // |d/dt e^{-1/4t}| = (1/16) e^{-1/8}
    let expect = (1.0f64 / 16.0) * (-0.125f64).exp();
    assert_relative_eq!(report.numeric, expect, epsilon = 1e-5);
    assert!(
        report.bound >= report.numeric,
        "bound {:e} < numeric {:e}",
        report.bound,
        report.numeric
    );
}

#[test]
fn constant_phi_without_boundary_reduces_to_g() {
    // |d/dt Xi| = |G_t| exactly for phi = 1 on a boundaryless shrinker
    let cyl = catalog::builtin::<f64>("cylinder").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let t = 2.0;
    let report = xi_derivative_bound(&cyl, &one, t, &quad(), 0.05, 1e-9).unwrap();
    let g = eval_g(&cyl, t, &quad()).unwrap().value.abs();
    assert_relative_eq!(report.numeric, g, epsilon = 1e-5);
    // the bound collapses to |phi|_0 |G_t| (c_R = 0, |phi|_1 = 0)
    assert_relative_eq!(report.bound, g, epsilon = 1e-7);
}

#[test]
fn bound_dominates_on_catalog_shrinkers() {
    let quad = quad();
    let surfaces = ["sphere", "cylinder", "plane-ext", "cylinder-ext"];
    for id in surfaces {
        let s = catalog::builtin::<f64>(id).unwrap();
        let phis = HomogeneousTestFunction::bundled(s.ambient_dim());
        for phi in &phis {
            for t in [1.05, 2.0, 16.0] {
                let report = xi_derivative_bound(&s, phi, t, &quad, 0.05, 1e-9).unwrap();
                assert!(
                    report.numeric <= report.bound + 1e-9,
                    "{id}/{} at t={t}: numeric {:e} > bound {:e}",
                    phi.id,
                    report.numeric,
                    report.bound
                );
            }
        }
    }
}

#[test]
fn full_plane_is_rejected_by_the_bound() {
    // through the origin: the |X|^{-2} decomposition does not apply
    let plane = catalog::builtin::<f64>("plane").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    assert!(xi_derivative_bound(&plane, &one, 2.0, &quad(), 0.05, 1e-9).is_err());
}

#[test]
fn near_critical_time_is_rejected() {
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    assert!(xi_derivative_bound(&ext, &one, 1.01, &quad(), 0.05, 1e-9).is_err());
}

#[test]
fn c1_is_finite_and_positive() {
    let c1 = c1_constant::<f64>(2, std::f64::consts::PI).unwrap();
    assert!(c1 > 0.0 && c1.is_finite());
    // n = 1 is outside the dyadic chain
    assert!(c1_constant::<f64>(1, 1.0).is_err());
}

#[test]
fn xi_is_cauchy_along_dyadic_scales() {
    // increments of Xi along 2^j are below the integrated bound
    let ext = catalog::builtin::<f64>("plane-ext").unwrap();
    let one = HomogeneousTestFunction::constant(3);
    let quad = quad();
    let mut prev = shrinkerlab_core::functionals::eval_xi(&ext, &one, 2.0, &quad)
        .unwrap()
        .value;
    let mut total_increment = 0.0;
    for j in 2..=5 {
        let t = 2.0f64.powi(j);
        let next = shrinkerlab_core::functionals::eval_xi(&ext, &one, t, &quad)
            .unwrap()
            .value;
        total_increment += (next - prev).abs();
        prev = next;
    }
    let budget = integrated_bound(&ext, &one, 2.0, 32.0, &quad).unwrap();
    assert!(
        total_increment <= budget + 1e-9,
        "increments {total_increment:e} exceed integrated bound {budget:e}"
    );
}
