//! Built-in surface catalog: the exact shrinkers (plane, `S^n(sqrt(2n))`,
//! `S^k(sqrt(2k)) x R^{n-k}`), exterior pieces of them, a non-shrinker
//! sphere for contrast, and discretizations at chosen refinement levels.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::io::axis_basis;
use crate::geom::{Projection, ShrinkerSurface};
use crate::graphs::{solve_graph_shrinker, GraphFunction, NewtonOptions};
use crate::scalar::Real;

/// Ids of the analytic built-ins, in listing order.
pub const BUILTIN_IDS: [&str; 8] = [
    "plane",
    "plane-xz",
    "plane-ext",
    "circle",
    "sphere",
    "sphere-unit",
    "cylinder",
    "cylinder-ext",
];

/// Construct a built-in analytic surface by id.
pub fn builtin<S: Real>(id: &str) -> Result<ShrinkerSurface<S>> {
    let sqrt2 = S::two().sqrt();
    match id {
        // n = 2 plane through the origin in R^3, spanned by e1, e2
        "plane" => ShrinkerSurface::plane(id, axis_basis(2, 3), 1),
        // a second plane, spanned by e1, e3, for cross-section separation
        "plane-xz" => {
            let mut basis = axis_basis::<S>(2, 3);
            basis[1] = vec![S::zero(), S::zero(), S::one()];
            ShrinkerSurface::plane(id, basis, 1)
        }
        // exterior plane (plane \ B_1)
        "plane-ext" => ShrinkerSurface::exterior_plane(id, axis_basis(2, 3), 1, S::one()),
        // circle of radius sqrt(2) in R^2: the n = 1 closed shrinker
        "circle" => ShrinkerSurface::sphere(id, 1, 1, sqrt2),
        // S^2(2) in R^3: the n = 2 closed shrinker
        "sphere" => ShrinkerSurface::sphere(id, 2, 1, S::two()),
        // unit sphere: not a shrinker; residual 1.5 in sup norm
        "sphere-unit" => ShrinkerSurface::sphere(id, 2, 1, S::one()),
        // S^1(sqrt 2) x R in R^3
        "cylinder" => ShrinkerSurface::cylinder(id, 1, 2, 1, sqrt2),
        // exterior cylinder with boundary on the sphere of radius 2
        "cylinder-ext" => ShrinkerSurface::exterior_cylinder(id, 1, 2, 1, sqrt2, S::two()),
        other => Err(Error::OutOfDomain(format!("unknown catalog surface `{other}`"))),
    }
}

/// A catalog row for listings.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub kind: String,
    pub dimension: usize,
    pub codimension: usize,
    pub shrinker: bool,
    pub description: String,
}

/// Deterministic listing of all analytic built-ins.
pub fn entries<S: Real>() -> Vec<CatalogEntry> {
    BUILTIN_IDS
        .iter()
        .map(|id| {
            let s = builtin::<S>(id).expect("builtin catalog construction");
            let description = match *id {
                "plane" => "n-plane span(e1, e2) through the origin in R^3",
                "plane-xz" => "n-plane span(e1, e3) through the origin in R^3",
                "plane-ext" => "exterior plane, boundary on the unit sphere",
                "circle" => "circle of radius sqrt(2) in R^2",
                "sphere" => "round sphere of radius 2 = sqrt(2n) in R^3",
                "sphere-unit" => "round unit sphere (not a shrinker)",
                "cylinder" => "round cylinder S^1(sqrt 2) x R in R^3",
                "cylinder-ext" => "exterior cylinder, boundary on the sphere of radius 2",
                _ => "",
            };
            CatalogEntry {
                id: (*id).into(),
                kind: s.kind_name().into(),
                dimension: s.dimension(),
                codimension: s.codimension(),
                shrinker: s.is_exact_shrinker(),
                description: description.into(),
            }
        })
        .collect()
}

/// Icosphere discretization of `S^2(radius)`: icosahedron subdivided
/// `level` times, vertices projected to the sphere.
pub fn icosphere<S: Real>(radius: S, level: u32) -> Result<ShrinkerSurface<S>> {
    let raw: [[f64; 3]; 12] = {
        let p = (1.0 + 5.0f64.sqrt()) / 2.0;
        [
            [-1.0, p, 0.0],
            [1.0, p, 0.0],
            [-1.0, -p, 0.0],
            [1.0, -p, 0.0],
            [0.0, -1.0, p],
            [0.0, 1.0, p],
            [0.0, -1.0, -p],
            [0.0, 1.0, -p],
            [p, 0.0, -1.0],
            [p, 0.0, 1.0],
            [-p, 0.0, -1.0],
            [-p, 0.0, 1.0],
        ]
    };
    let scale = |v: [f64; 3]| -> Vec<S> {
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        vec![
            S::lit(v[0] / len) * radius,
            S::lit(v[1] / len) * radius,
            S::lit(v[2] / len) * radius,
        ]
    };
    let vertices: Vec<Vec<S>> = raw.iter().map(|&v| scale(v)).collect();
    let faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut mesh = ShrinkerSurface::triangle_mesh(
        &format!("sphere-mesh-l{level}"),
        vertices,
        faces,
        Some(Projection::Sphere { radius }),
    )?;
    for _ in 0..level {
        mesh = mesh.refine()?.surface;
    }
    Ok(mesh)
}

/// Structured triangulation of the cylinder `S^1(radius) x [-half_len,
/// half_len]`, with matching angular and axial spacing at `level = 0`
/// refined dyadically.
pub fn cylinder_mesh<S: Real>(radius: S, half_len: S, level: u32) -> Result<ShrinkerSurface<S>> {
    let base_circ = 24usize;
    let n_theta = base_circ << level;
    let target = (S::two() * S::PI() * radius) / S::of_usize(n_theta);
    let n_axis = ((S::two() * half_len / target)
        .ceil()
        .to_usize()
        .unwrap_or(8))
    .max(4);
    let mut vertices = Vec::with_capacity(n_theta * (n_axis + 1));
    for j in 0..=n_axis {
        let y = -half_len
            + S::two() * half_len * S::of_usize(j) / S::of_usize(n_axis);
        for i in 0..n_theta {
            let theta = S::two() * S::PI() * S::of_usize(i) / S::of_usize(n_theta);
            vertices.push(vec![radius * theta.cos(), radius * theta.sin(), y]);
        }
    }
    let mut faces = Vec::with_capacity(2 * n_theta * n_axis);
    for j in 0..n_axis {
        for i in 0..n_theta {
            let a = j * n_theta + i;
            let b = j * n_theta + (i + 1) % n_theta;
            let c = (j + 1) * n_theta + i;
            let d = (j + 1) * n_theta + (i + 1) % n_theta;
            faces.push([a, b, d]);
            faces.push([a, d, c]);
        }
    }
    ShrinkerSurface::triangle_mesh(
        &format!("cylinder-mesh-l{level}"),
        vertices,
        faces,
        Some(Projection::Cylinder {
            sphere_dim: 1,
            radius,
        }),
    )
}

/// Uniform polyline discretization of the circle of radius `radius`.
pub fn circle_polyline<S: Real>(radius: S, level: u32) -> Result<ShrinkerSurface<S>> {
    let count = 64usize << level;
    let vertices: Vec<Vec<S>> = (0..count)
        .map(|i| {
            let theta = S::two() * S::PI() * S::of_usize(i) / S::of_usize(count);
            vec![radius * theta.cos(), radius * theta.sin()]
        })
        .collect();
    ShrinkerSurface::polyline(
        &format!("circle-poly-l{level}"),
        vertices,
        true,
        Some(Projection::Sphere { radius }),
    )
}

/// Newton-solved shrinker-graph fixture over the annulus `[4, 16]` with
/// small nonlinear boundary data; the workhorse for the rescaled-system
/// checks.
pub fn shrinker_graph_fixture<S: Real>(h: S) -> Result<GraphFunction<S>> {
    let boundary = Arc::new(|x: S, y: S| {
        let r_sq = x * x + y * y;
        vec![S::lit(0.05) * (x * x - y * y) / r_sq]
    });
    let (u, _) = solve_graph_shrinker(
        S::four(),
        S::lit(16.0),
        h,
        1,
        boundary,
        None,
        &NewtonOptions::default(),
    )?;
    Ok(u)
}

/// Graph-patch surface wrapping [`shrinker_graph_fixture`].
pub fn shrinker_graph_patch<S: Real>(h: S) -> Result<ShrinkerSurface<S>> {
    let u = shrinker_graph_fixture(h)?;
    ShrinkerSurface::graph_patch("graph-fixture", u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_construct() {
        for id in BUILTIN_IDS {
            let s = builtin::<f64>(id).unwrap();
            assert_eq!(s.id, id);
        }
    }

    #[test]
    fn shrinker_flags() {
        assert!(builtin::<f64>("plane").unwrap().is_exact_shrinker());
        assert!(builtin::<f64>("circle").unwrap().is_exact_shrinker());
        assert!(builtin::<f64>("sphere").unwrap().is_exact_shrinker());
        assert!(builtin::<f64>("cylinder").unwrap().is_exact_shrinker());
        assert!(!builtin::<f64>("sphere-unit").unwrap().is_exact_shrinker());
    }

    #[test]
    fn icosphere_counts() {
        let s = icosphere::<f64>(2.0, 1).unwrap();
        match s.kind() {
            crate::geom::SurfaceKind::TriangleMesh(d) => {
                assert_eq!(d.faces.len(), 80);
                assert_eq!(d.vertices.len(), 42);
            }
            _ => panic!("expected a mesh"),
        }
    }
}
