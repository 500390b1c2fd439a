//! Pointwise geometry of discrete surfaces by local polynomial fitting over
//! the estimated tangent plane, plus the shared curvature algebra used by
//! graph patches.
//!
//! The fit runs over the 2-ring neighborhood of each vertex (grown to the
//! 3-ring where the 2-ring is too small) with the highest basis degree the
//! neighborhood supports, up to quartic. Degree matters: with a plain
//! quadratic basis the even-degree surface terms alias onto the curvature
//! coefficients at O(h^2) with a large constant, while a quartic basis
//! pushes the aliasing to O(h^3) and restores clean second-order (or
//! better) convergence of |B| and H on both structured and icosahedral
//! meshes. The second fundamental form is still read off the quadratic
//! coefficients of the fitted height map.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::geom::sample::GeometrySample;
use crate::geom::surface::triangle_area;
use crate::numerics::linalg::{least_squares, symmetric_eigen, DMat};
use crate::scalar::{dot, norm, sub, Real};

/// Curvature data of an immersion from coordinate tangents and raw second
/// derivatives at one point.
///
/// `tangents` are the (not necessarily orthonormal) coordinate basis vectors
/// `∂_i X`; `second` lists the ambient vectors `∂²_ij X` in the order
/// `(0,0), (0,1), (1,1)` for `n = 2` and `(0,0)` for `n = 1`.
pub fn immersion_pointwise<S: Real>(
    position: Vec<S>,
    tangents: Vec<Vec<S>>,
    second: Vec<Vec<S>>,
    weight: S,
) -> Result<GeometrySample<S>> {
    let n = tangents.len();
    let ambient = position.len();
    debug_assert_eq!(second.len(), n * (n + 1) / 2);
    // First fundamental form and its inverse.
    let mut g = DMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = dot(&tangents[i], &tangents[j]);
        }
    }
    let g_inv = g.inverse().ok_or_else(|| Error::DegenerateFit {
        element: 0,
        detail: "singular first fundamental form".into(),
    })?;
    // Orthonormal frame by Gram-Schmidt.
    let mut frame: Vec<Vec<S>> = Vec::with_capacity(n);
    for t in &tangents {
        let mut v = t.clone();
        for e in &frame {
            let c = dot(&v, e);
            for (a, b) in v.iter_mut().zip(e) {
                *a -= c * *b;
            }
        }
        let len = norm(&v);
        if len <= S::lit(1e-12) {
            return Err(Error::DegenerateFit {
                element: 0,
                detail: "tangent vectors are linearly dependent".into(),
            });
        }
        for a in v.iter_mut() {
            *a /= len;
        }
        frame.push(v);
    }
    // Normal projections of the second derivatives.
    let project_normal = |v: &[S]| -> Vec<S> {
        let mut out = v.to_vec();
        for e in &frame {
            let c = dot(&out, e);
            for (a, b) in out.iter_mut().zip(e) {
                *a -= c * *b;
            }
        }
        out
    };
    let sym_index = |i: usize, j: usize| -> usize {
        // (0,0) -> 0, (0,1) -> 1, (1,1) -> 2 for n = 2; (0,0) -> 0 for n = 1.
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match n {
            1 => 0,
            2 => a + b,
            _ => a * n + b - a * (a + 1) / 2,
        }
    };
    let b_forms: Vec<Vec<S>> = second.iter().map(|s| project_normal(s)).collect();
    // Mean curvature H = g^{ij} B_ij.
    let mut h = vec![S::zero(); ambient];
    for i in 0..n {
        for j in 0..n {
            let c = g_inv[(i, j)];
            let b = &b_forms[sym_index(i, j)];
            for (acc, v) in h.iter_mut().zip(b) {
                *acc += c * *v;
            }
        }
    }
    // |B|^2 = g^{ik} g^{jl} <B_ij, B_kl>.
    let mut b_sq = S::zero();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c = g_inv[(i, k)] * g_inv[(j, l)];
                    b_sq += c * dot(&b_forms[sym_index(i, j)], &b_forms[sym_index(k, l)]);
                }
            }
        }
    }
    Ok(GeometrySample::from_frame(
        position,
        frame,
        h,
        b_sq.max(S::zero()).sqrt(),
        weight,
    ))
}

/// Output of the per-vertex mesh fit.
pub struct MeshGeometry<S: Real> {
    pub samples: Vec<GeometrySample<S>>,
    pub boundary_edges: Vec<[usize; 2]>,
    pub boundary_conormals: Vec<(usize, Vec<S>)>,
    /// Graph distance (in edges) to the nearest boundary vertex, saturated
    /// at 255; closed meshes report 255 everywhere.
    pub boundary_distance: Vec<u8>,
}

/// Fit pointwise geometry at every mesh vertex.
pub fn mesh_vertex_geometry<S: Real>(
    vertices: &[Vec<S>],
    faces: &[[usize; 3]],
) -> Result<MeshGeometry<S>> {
    let nv = vertices.len();
    let mut neighbors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
    let mut edge_faces: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut lumped = vec![S::zero(); nv];
    for f in faces {
        let area = triangle_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
        let third = area / S::lit(3.0);
        for i in 0..3 {
            let a = f[i];
            let b = f[(i + 1) % 3];
            neighbors[a].insert(b);
            neighbors[b].insert(a);
            lumped[a] += third;
            let key = (a.min(b), a.max(b));
            *edge_faces.entry(key).or_insert(0) += 1;
        }
    }
    let boundary_edges: Vec<[usize; 2]> = edge_faces
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(&(a, b), _)| [a, b])
        .collect();
    let mut is_boundary = vec![false; nv];
    for e in &boundary_edges {
        is_boundary[e[0]] = true;
        is_boundary[e[1]] = true;
    }
    let boundary_distance = bfs_distance(&neighbors, &is_boundary);

    let mut samples = Vec::with_capacity(nv);
    for v in 0..nv {
        // 2-ring, grown to the 3-ring when too small for the quartic basis.
        let mut ring = grow_ring(&neighbors, v, 2);
        if ring.len() + 1 < QUARTIC_COEFFS_2D + 2 {
            ring = grow_ring(&neighbors, v, 3);
        }
        let sample = fit_vertex(vertices, v, &ring, 2, lumped[v])?;
        samples.push(sample);
    }

    // Outward conormals at boundary vertices: tangential, orthogonal to the
    // boundary direction, pointing away from the 1-ring centroid.
    let mut boundary_conormals = Vec::new();
    for v in 0..nv {
        if !is_boundary[v] {
            continue;
        }
        let bdir: Vec<usize> = boundary_edges
            .iter()
            .filter(|e| e.contains(&v))
            .map(|e| if e[0] == v { e[1] } else { e[0] })
            .collect();
        if bdir.is_empty() {
            continue;
        }
        let frame = &samples[v].tangent;
        let to_tangent = |w: &[S]| -> Vec<S> {
            let mut out = vec![S::zero(); w.len()];
            for e in frame {
                let c = dot(w, e);
                for (a, b) in out.iter_mut().zip(e) {
                    *a += c * *b;
                }
            }
            out
        };
        let edge = sub(&vertices[bdir[0]], &vertices[v]);
        let mut b_tan = to_tangent(&edge);
        let len = norm(&b_tan);
        if len <= S::lit(1e-14) {
            continue;
        }
        for a in b_tan.iter_mut() {
            *a /= len;
        }
        let mut centroid = vec![S::zero(); vertices[v].len()];
        for &w in &neighbors[v] {
            let d = sub(&vertices[w], &vertices[v]);
            for (a, b) in centroid.iter_mut().zip(&d) {
                *a += *b;
            }
        }
        let mut inward = to_tangent(&centroid);
        let c = dot(&inward, &b_tan);
        for (a, b) in inward.iter_mut().zip(&b_tan) {
            *a -= c * *b;
        }
        let len = norm(&inward);
        if len <= S::lit(1e-14) {
            continue;
        }
        let nu: Vec<S> = inward.iter().map(|&x| -x / len).collect();
        boundary_conormals.push((v, nu));
    }

    Ok(MeshGeometry {
        samples,
        boundary_edges,
        boundary_conormals,
        boundary_distance,
    })
}

/// Fit pointwise geometry at every polyline vertex.
pub fn curve_vertex_geometry<S: Real>(
    vertices: &[Vec<S>],
    closed: bool,
) -> Result<Vec<GeometrySample<S>>> {
    let nv = vertices.len();
    let seg_len = |i: usize| -> S {
        let j = (i + 1) % nv;
        norm(&sub(&vertices[j], &vertices[i]))
    };
    let mut samples = Vec::with_capacity(nv);
    for v in 0..nv {
        let mut ring: Vec<usize> = Vec::new();
        for off in -3i64..=3 {
            if off == 0 {
                continue;
            }
            let idx = v as i64 + off;
            if closed {
                ring.push(idx.rem_euclid(nv as i64) as usize);
            } else if idx >= 0 && (idx as usize) < nv {
                ring.push(idx as usize);
            }
        }
        ring.sort_unstable();
        ring.dedup();
        let weight = if closed {
            (seg_len((v + nv - 1) % nv) + seg_len(v)) * S::half()
        } else {
            let mut w = S::zero();
            if v > 0 {
                w += seg_len(v - 1) * S::half();
            }
            if v + 1 < nv {
                w += seg_len(v) * S::half();
            }
            w
        };
        samples.push(fit_vertex(vertices, v, &ring, 1, weight)?);
    }
    Ok(samples)
}

/// Local polynomial fit of the neighborhood of vertex `center` over its
/// PCA tangent space. `n` is the intrinsic dimension (1 or 2).
fn fit_vertex<S: Real>(
    vertices: &[Vec<S>],
    center: usize,
    ring: &[usize],
    n: usize,
    weight: S,
) -> Result<GeometrySample<S>> {
    let ambient = vertices[center].len();
    let deltas: Vec<Vec<S>> = ring
        .iter()
        .map(|&w| sub(&vertices[w], &vertices[center]))
        .collect();
    if deltas.is_empty() {
        return Err(Error::DegenerateFit {
            element: center,
            detail: "isolated vertex".into(),
        });
    }
    // PCA tangent estimate.
    let mut cov: DMat<S> = DMat::zeros(ambient, ambient);
    for d in &deltas {
        for i in 0..ambient {
            for j in 0..ambient {
                cov[(i, j)] += d[i] * d[j];
            }
        }
    }
    let (evals, evecs) = symmetric_eigen(&cov);
    if evals[n - 1] <= S::lit(1e-14) * evals[0].max(S::lit(1e-300)) {
        return Err(Error::DegenerateFit {
            element: center,
            detail: "rank-deficient neighborhood".into(),
        });
    }
    let tangent_est: Vec<Vec<S>> = (0..n)
        .map(|k| (0..ambient).map(|i| evecs[(i, k)]).collect())
        .collect();
    // Local coordinates, normalized by the mean neighbor distance for
    // conditioning.
    let hbar = {
        let mut s = S::zero();
        for d in &deltas {
            s += norm(d);
        }
        s / S::of_usize(deltas.len())
    };
    if hbar <= S::zero() {
        return Err(Error::DegenerateFit {
            element: center,
            detail: "zero-diameter neighborhood".into(),
        });
    }
    let coords: Vec<Vec<S>> = deltas
        .iter()
        .map(|d| tangent_est.iter().map(|t| dot(d, t) / hbar).collect())
        .collect();
    // Highest monomial degree the neighborhood supports, up to quartic,
    // degrading on rank deficiency (coarse meshes can project 2-rings onto
    // nearly algebraic point sets).
    let coef_count = |deg: usize| -> usize {
        if n == 2 {
            (deg + 1) * (deg + 2) / 2
        } else {
            deg + 1
        }
    };
    let rows_avail = coords.len() + 1;
    let mut start_degree = 4usize;
    while start_degree > 2 && rows_avail < coef_count(start_degree) + 2 {
        start_degree -= 1;
    }
    let mut coefs: Option<Vec<Vec<S>>> = None;
    'degrees: for deg in (2..=start_degree).rev() {
        let n_coef = coef_count(deg);
        if rows_avail < n_coef {
            continue;
        }
        let basis_row = |xi: &[S]| -> Vec<S> {
            let mut row = Vec::with_capacity(n_coef);
            if n == 2 {
                let (x, y) = (xi[0], xi[1]);
                for total in 0..=deg {
                    for j in 0..=total {
                        row.push(x.powi((total - j) as i32) * y.powi(j as i32));
                    }
                }
            } else {
                let x = xi[0];
                for total in 0..=deg {
                    row.push(x.powi(total as i32));
                }
            }
            row
        };
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(rows_avail);
        rows.push(basis_row(&vec![S::zero(); n]));
        for xi in &coords {
            rows.push(basis_row(xi));
        }
        let design = DMat::from_rows(&rows);
        let mut per_coord: Vec<Vec<S>> = Vec::with_capacity(ambient);
        for c in 0..ambient {
            let mut rhs = Vec::with_capacity(rows_avail);
            rhs.push(S::zero());
            for d in &deltas {
                rhs.push(d[c]);
            }
            match least_squares(&design, &rhs) {
                Some(sol) => per_coord.push(sol),
                None => continue 'degrees,
            }
        }
        coefs = Some(per_coord);
        break;
    }
    let coefs = coefs.ok_or_else(|| Error::DegenerateFit {
        element: center,
        detail: "rank-deficient least-squares fit at every degree".into(),
    })?;
    // Derivatives at the center, undoing the hbar scaling.
    let lin = |c: usize, i: usize| coefs[c][1 + i] / hbar;
    let h2 = hbar * hbar;
    let tangents: Vec<Vec<S>> = (0..n)
        .map(|i| (0..ambient).map(|c| lin(c, i)).collect())
        .collect();
    let second: Vec<Vec<S>> = if n == 2 {
        let sxx: Vec<S> = (0..ambient).map(|c| S::two() * coefs[c][3] / h2).collect();
        let sxy: Vec<S> = (0..ambient).map(|c| coefs[c][4] / h2).collect();
        let syy: Vec<S> = (0..ambient).map(|c| S::two() * coefs[c][5] / h2).collect();
        vec![sxx, sxy, syy]
    } else {
        vec![(0..ambient).map(|c| S::two() * coefs[c][2] / h2).collect()]
    };
    immersion_pointwise(vertices[center].clone(), tangents, second, weight).map_err(|e| match e {
        Error::DegenerateFit { detail, .. } => Error::DegenerateFit {
            element: center,
            detail,
        },
        other => other,
    })
}

const QUARTIC_COEFFS_2D: usize = 15;

fn grow_ring(neighbors: &[BTreeSet<usize>], v: usize, depth: usize) -> Vec<usize> {
    let mut set: BTreeSet<usize> = neighbors[v].clone();
    for _ in 1..depth {
        let frontier: Vec<usize> = set.iter().copied().collect();
        for w in frontier {
            for &u in &neighbors[w] {
                set.insert(u);
            }
        }
    }
    set.remove(&v);
    set.into_iter().collect()
}

fn bfs_distance(neighbors: &[BTreeSet<usize>], seed: &[bool]) -> Vec<u8> {
    let mut dist = vec![u8::MAX; neighbors.len()];
    let mut queue = VecDeque::new();
    for (v, &s) in seed.iter().enumerate() {
        if s {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d == u8::MAX - 1 {
            continue;
        }
        for &w in &neighbors[v] {
            if dist[w] > d + 1 {
                dist[w] = d + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}
