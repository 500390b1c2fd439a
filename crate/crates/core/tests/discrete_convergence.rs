//! Convergence of the fitted discrete geometry toward the closed forms on
//! refined catalog shrinkers.

use shrinkerlab_core::catalog;
use shrinkerlab_core::geom::{QuadratureSpec, SurfaceKind};
use shrinkerlab_core::Surface;

/// Sup-norm error of |B|^2 against the closed form, and the drift-identity
/// residual, restricted to interior vertices.
fn mesh_errors(surface: &Surface, b_sq_exact: f64) -> (f64, f64, f64) {
    let mut b_err: f64 = 0.0;
    let mut drift: f64 = 0.0;
    let mut b_mean_acc = 0.0;
    let mut w_acc = 0.0;
    match surface.kind() {
        SurfaceKind::TriangleMesh(d) => {
            for (v, s) in d.samples.iter().enumerate() {
                if d.boundary_distance[v] < 2 {
                    continue;
                }
                let b_sq = s.b_norm * s.b_norm;
                b_err = b_err.max((b_sq - b_sq_exact).abs());
                let r = 2.0
                    * s.position
                        .iter()
                        .zip(&s.mean_curvature)
                        .map(|(x, h)| x * h)
                        .sum::<f64>()
                    + s.xn.iter().map(|x| x * x).sum::<f64>();
                drift = drift.max(r.abs());
                b_mean_acc += b_sq * s.weight;
                w_acc += s.weight;
            }
        }
        SurfaceKind::PolylineCurve(d) => {
            for s in &d.samples {
                let b_sq = s.b_norm * s.b_norm;
                b_err = b_err.max((b_sq - b_sq_exact).abs());
                let r = 2.0
                    * s.position
                        .iter()
                        .zip(&s.mean_curvature)
                        .map(|(x, h)| x * h)
                        .sum::<f64>()
                    + s.xn.iter().map(|x| x * x).sum::<f64>();
                drift = drift.max(r.abs());
                b_mean_acc += b_sq * s.weight;
                w_acc += s.weight;
            }
        }
        _ => panic!("discrete surface expected"),
    }
    (b_err, drift, b_mean_acc / w_acc)
}

#[test]
fn sphere_mesh_curvature_converges() {
    let exact = 0.5; // |B|^2 = n / rho^2 = 2/4
    let mut drift_sups = Vec::new();
    for level in [2u32, 3, 4] {
        let mesh = catalog::icosphere::<f64>(2.0, level).unwrap();
        let (b_err, drift, b_mean) = mesh_errors(&mesh, exact);
        println!(
            "sphere level {level}: b_sq sup err {b_err:.3e}, drift sup {drift:.3e}, b_sq mean {b_mean:.10}"
        );
        drift_sups.push(drift);
    }
    for w in drift_sups.windows(2) {
        let order = (w[0] / w[1]).log2();
        println!("sphere drift order: {order:.3}");
        assert!(order >= 1.9, "order {order}");
    }
    assert!(drift_sups.last().unwrap() < &1e-3);
}

#[test]
fn cylinder_mesh_curvature_converges() {
    let exact = 0.5; // |B|^2 = k / rho^2 = 1/2
    let mut drift_sups = Vec::new();
    for level in [1u32, 2, 3] {
        let mesh = catalog::cylinder_mesh::<f64>(2.0f64.sqrt(), 6.0, level).unwrap();
        let (b_err, drift, b_mean) = mesh_errors(&mesh, exact);
        println!(
            "cylinder level {level}: b_sq sup err {b_err:.3e}, drift sup {drift:.3e}, b_sq mean {b_mean:.10}"
        );
        drift_sups.push(drift);
    }
    for w in drift_sups.windows(2) {
        let order = (w[0] / w[1]).log2();
        println!("cylinder drift order: {order:.3}");
        assert!(order >= 1.9, "order {order}");
    }
    assert!(drift_sups.last().unwrap() < &1e-3);
}

#[test]
fn circle_polyline_curvature_converges() {
    let exact = 0.5; // |B|^2 = 1 / rho^2 = 1/2
    let mut drift_sups = Vec::new();
    for level in [0u32, 1, 2] {
        let poly = catalog::circle_polyline::<f64>(2.0f64.sqrt(), level).unwrap();
        let (b_err, drift, _) = mesh_errors(&poly, exact);
        println!("circle level {level}: b_sq sup err {b_err:.3e}, drift sup {drift:.3e}");
        drift_sups.push(drift);
    }
    for w in drift_sups.windows(2) {
        let order = (w[0] / w[1]).log2();
        println!("circle drift order: {order:.3}");
        assert!(order >= 1.9, "order {order}");
    }
}

#[test]
fn shrinker_residual_measures_discretization() {
    let quad = QuadratureSpec::default();
    let mesh = catalog::icosphere::<f64>(2.0, 3).unwrap();
    let r = mesh.shrinker_residual(&quad).unwrap();
    println!("sphere mesh level 3 shrinker residual: sup {:.3e}", r.sup);
    assert!(r.sup < 1e-2);
}
