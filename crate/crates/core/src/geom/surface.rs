//! Immersed submanifold representations: the exact analytic catalog (planes,
//! round spheres, round cylinders, exterior pieces of both) and the discrete
//! forms (triangle meshes, polyline curves, annulus graph patches).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::fit::{curve_vertex_geometry, immersion_pointwise, mesh_vertex_geometry};
use crate::geom::sample::GeometrySample;
use crate::graphs::GraphFunction;
use crate::scalar::{axpy, dot, norm, norm_sq, scale, sub, Real};

/// Where to evaluate pointwise geometry.
#[derive(Debug, Clone)]
pub enum Location<S: Real> {
    /// Ambient point on an analytic surface.
    Ambient(Vec<S>),
    /// Vertex / grid-node index on a discrete surface.
    Node(usize),
}

/// Projection used to put refined vertices back on the analytic model a
/// discrete surface was sampled from.
#[derive(Debug, Clone, Copy)]
pub enum Projection<S: Real> {
    Sphere { radius: S },
    Cylinder { sphere_dim: usize, radius: S },
}

#[derive(Debug, Clone)]
pub struct PlaneData<S: Real> {
    /// Orthonormal basis of the plane (n ambient vectors).
    pub basis: Vec<Vec<S>>,
    /// `0` for the full plane; `R > 0` for the exterior piece `plane \ B_R`.
    pub inner_radius: S,
}

#[derive(Debug, Clone)]
pub struct SphereData<S: Real> {
    /// Sphere radius.
    pub radius: S,
}

#[derive(Debug, Clone)]
pub struct CylinderData<S: Real> {
    /// Dimension `k` of the sphere factor `S^k`.
    pub sphere_dim: usize,
    /// Radius of the sphere factor.
    pub radius: S,
    /// `0` for the full cylinder; `R` for the exterior piece.
    pub inner_radius: S,
}

#[derive(Debug, Clone)]
pub struct MeshData<S: Real> {
    pub vertices: Vec<Vec<S>>,
    pub faces: Vec<[usize; 3]>,
    pub projection: Option<Projection<S>>,
    /// Per-vertex geometry from the local polynomial fit.
    pub samples: Vec<GeometrySample<S>>,
    /// Boundary edges (each belongs to exactly one face).
    pub boundary_edges: Vec<[usize; 2]>,
    /// Outward conormal per boundary vertex, `(vertex, conormal)`.
    pub boundary_conormals: Vec<(usize, Vec<S>)>,
    /// Graph distance to the mesh boundary, saturating at 255.
    pub boundary_distance: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct CurveData<S: Real> {
    pub vertices: Vec<Vec<S>>,
    pub closed: bool,
    pub projection: Option<Projection<S>>,
    pub samples: Vec<GeometrySample<S>>,
}

#[derive(Clone)]
pub struct GraphPatchData<S: Real> {
    pub function: GraphFunction<S>,
    /// Per active node geometry (indexed by grid node id).
    pub samples: Vec<Option<GeometrySample<S>>>,
}

impl<S: Real> std::fmt::Debug for GraphPatchData<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphPatchData")
            .field("function", &self.function)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum SurfaceKind<S: Real> {
    Plane(PlaneData<S>),
    RoundSphere(SphereData<S>),
    RoundCylinder(CylinderData<S>),
    GraphPatch(GraphPatchData<S>),
    TriangleMesh(MeshData<S>),
    PolylineCurve(CurveData<S>),
}

/// An immersed `n`-submanifold of `R^{n+m}`, either analytic or discrete.
#[derive(Debug, Clone)]
pub struct ShrinkerSurface<S: Real> {
    pub id: String,
    pub(crate) kind: SurfaceKind<S>,
    n: usize,
    m: usize,
    boundary_radius: Option<S>,
}

const BASIS_TOL: f64 = 1e-12;

impl<S: Real> ShrinkerSurface<S> {
    // ----- constructors -------------------------------------------------

    /// `n`-plane through the origin spanned by `basis` in `R^{n+m}`.
    pub fn plane(id: &str, basis: Vec<Vec<S>>, codim: usize) -> Result<Self> {
        Self::plane_with_inner(id, basis, codim, S::zero())
    }

    /// Exterior plane `P \ B_R`; its boundary sits on the sphere of radius
    /// `inner_radius`.
    pub fn exterior_plane(
        id: &str,
        basis: Vec<Vec<S>>,
        codim: usize,
        inner_radius: S,
    ) -> Result<Self> {
        if !(inner_radius > S::zero()) {
            return Err(Error::InvalidSurface("exterior plane needs R > 0".into()));
        }
        Self::plane_with_inner(id, basis, codim, inner_radius)
    }

    fn plane_with_inner(id: &str, basis: Vec<Vec<S>>, codim: usize, r0: S) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::InvalidSurface("plane needs at least one basis vector".into()));
        }
        let dim = basis[0].len();
        if dim != n + codim {
            return Err(Error::InvalidSurface(format!(
                "plane basis vectors live in R^{dim} but n + m = {}",
                n + codim
            )));
        }
        for i in 0..n {
            for j in 0..=i {
                let d = dot(&basis[i], &basis[j]);
                let target = if i == j { S::one() } else { S::zero() };
                if (d - target).abs() > S::lit(BASIS_TOL) {
                    return Err(Error::InvalidSurface(format!(
                        "plane basis not orthonormal: <b{i}, b{j}> = {d}"
                    )));
                }
            }
        }
        Ok(Self {
            id: id.into(),
            boundary_radius: (r0 > S::zero()).then_some(r0),
            kind: SurfaceKind::Plane(PlaneData {
                basis,
                inner_radius: r0,
            }),
            n,
            m: codim,
        })
    }

    /// Round sphere `S^n(radius)` in the first `n + 1` coordinates of
    /// `R^{n+m}`.
    pub fn sphere(id: &str, n: usize, codim: usize, radius: S) -> Result<Self> {
        if !(radius > S::zero()) {
            return Err(Error::InvalidSurface("sphere radius must be positive".into()));
        }
        if n == 0 || codim == 0 {
            return Err(Error::InvalidSurface("sphere needs n >= 1, m >= 1".into()));
        }
        Ok(Self {
            id: id.into(),
            kind: SurfaceKind::RoundSphere(SphereData { radius }),
            n,
            m: codim,
            boundary_radius: None,
        })
    }

    /// Round cylinder `S^k(radius) x R^{n-k}`, sphere factor in the first
    /// `k + 1` coordinates, axis in the following `n - k`.
    pub fn cylinder(id: &str, sphere_dim: usize, n: usize, codim: usize, radius: S) -> Result<Self> {
        Self::cylinder_with_inner(id, sphere_dim, n, codim, radius, S::zero())
    }

    /// Exterior cylinder `(S^k x R^{n-k}) \ B_R`.
    pub fn exterior_cylinder(
        id: &str,
        sphere_dim: usize,
        n: usize,
        codim: usize,
        radius: S,
        inner_radius: S,
    ) -> Result<Self> {
        if !(inner_radius > radius) {
            return Err(Error::InvalidSurface(
                "exterior cylinder needs R > sphere radius".into(),
            ));
        }
        Self::cylinder_with_inner(id, sphere_dim, n, codim, radius, inner_radius)
    }

    fn cylinder_with_inner(
        id: &str,
        k: usize,
        n: usize,
        codim: usize,
        radius: S,
        r0: S,
    ) -> Result<Self> {
        if !(radius > S::zero()) {
            return Err(Error::InvalidSurface("cylinder radius must be positive".into()));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidSurface("cylinder needs 1 <= k < n".into()));
        }
        if codim == 0 {
            return Err(Error::InvalidSurface("cylinder needs m >= 1".into()));
        }
        if n - k > 2 || k > 2 {
            return Err(Error::Unsupported(
                "cylinder quadrature supports sphere and axis factors of dimension <= 2".into(),
            ));
        }
        Ok(Self {
            id: id.into(),
            boundary_radius: (r0 > S::zero()).then_some(r0),
            kind: SurfaceKind::RoundCylinder(CylinderData {
                sphere_dim: k,
                radius,
                inner_radius: r0,
            }),
            n,
            m: codim,
        })
    }

    /// Triangle mesh (`n = 2`) with vertex positions in `R^{2+m}`.
    pub fn triangle_mesh(
        id: &str,
        vertices: Vec<Vec<S>>,
        faces: Vec<[usize; 3]>,
        projection: Option<Projection<S>>,
    ) -> Result<Self> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(Error::InvalidSurface("mesh needs vertices and faces".into()));
        }
        let dim = vertices[0].len();
        if dim < 3 {
            return Err(Error::InvalidSurface("mesh vertices must live in R^{2+m}, m >= 1".into()));
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidSurface("inconsistent vertex dimensions".into()));
        }
        let bbox = bounding_scale(&vertices);
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidSurface(format!("face {fi} references missing vertex")));
            }
            let area = triangle_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
            if area <= S::lit(1e-14) * bbox * bbox {
                return Err(Error::InvalidSurface(format!(
                    "face {fi} is degenerate (area {area})"
                )));
            }
        }
        let geo = mesh_vertex_geometry(&vertices, &faces)?;
        let data = MeshData {
            vertices,
            faces,
            projection,
            samples: geo.samples,
            boundary_edges: geo.boundary_edges,
            boundary_conormals: geo.boundary_conormals,
            boundary_distance: geo.boundary_distance,
        };
        Ok(Self {
            id: id.into(),
            n: 2,
            m: dim - 2,
            boundary_radius: None,
            kind: SurfaceKind::TriangleMesh(data),
        })
    }

    /// Polyline curve (`n = 1`) in `R^{1+m}`.
    pub fn polyline(
        id: &str,
        vertices: Vec<Vec<S>>,
        closed: bool,
        projection: Option<Projection<S>>,
    ) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidSurface("polyline needs at least 3 vertices".into()));
        }
        let dim = vertices[0].len();
        if dim < 2 {
            return Err(Error::InvalidSurface("polyline vertices must live in R^{1+m}".into()));
        }
        let count = vertices.len();
        let last = if closed { count } else { count - 1 };
        for i in 0..last {
            let a = &vertices[i];
            let b = &vertices[(i + 1) % count];
            if norm(&sub(b, a)) <= S::zero() {
                return Err(Error::InvalidSurface(format!("segment {i} has zero length")));
            }
        }
        let samples = curve_vertex_geometry(&vertices, closed)?;
        Ok(Self {
            id: id.into(),
            n: 1,
            m: dim - 1,
            boundary_radius: None,
            kind: SurfaceKind::PolylineCurve(CurveData {
                vertices,
                closed,
                projection,
                samples,
            }),
        })
    }

    /// Graph patch over a planar annulus (`n = 2`).
    pub fn graph_patch(id: &str, function: GraphFunction<S>) -> Result<Self> {
        let m = function.components();
        let mut samples = vec![None; function.node_count()];
        for node in function.active_nodes() {
            samples[node] = Some(graph_node_sample(&function, node)?);
        }
        Ok(Self {
            id: id.into(),
            n: 2,
            m,
            boundary_radius: None,
            kind: SurfaceKind::GraphPatch(GraphPatchData { function, samples }),
        })
    }

    // ----- accessors ----------------------------------------------------

    #[inline]
    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn codimension(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.n + self.m
    }

    #[inline]
    pub fn kind(&self) -> &SurfaceKind<S> {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            SurfaceKind::Plane(p) if p.inner_radius > S::zero() => "exterior-plane",
            SurfaceKind::Plane(_) => "plane",
            SurfaceKind::RoundSphere(_) => "round-sphere",
            SurfaceKind::RoundCylinder(c) if c.inner_radius > S::zero() => "exterior-cylinder",
            SurfaceKind::RoundCylinder(_) => "round-cylinder",
            SurfaceKind::GraphPatch(_) => "graph-patch",
            SurfaceKind::TriangleMesh(_) => "triangle-mesh",
            SurfaceKind::PolylineCurve(_) => "polyline-curve",
        }
    }

    /// Radius `R` with the boundary on `∂B_R`, when one exists.
    #[inline]
    pub fn boundary_radius(&self) -> Option<S> {
        self.boundary_radius
    }

    /// Distance from the origin to the nearest surface point.
    pub fn inner_radius(&self) -> S {
        match &self.kind {
            SurfaceKind::Plane(p) => p.inner_radius,
            SurfaceKind::RoundSphere(s) => s.radius,
            SurfaceKind::RoundCylinder(c) => {
                if c.inner_radius > c.radius {
                    c.inner_radius
                } else {
                    c.radius
                }
            }
            SurfaceKind::GraphPatch(g) => {
                let mut r = S::infinity();
                for s in g.samples.iter().flatten() {
                    r = r.min(s.radius());
                }
                r
            }
            SurfaceKind::TriangleMesh(d) => {
                let mut r = S::infinity();
                for v in &d.vertices {
                    r = r.min(norm(v));
                }
                r
            }
            SurfaceKind::PolylineCurve(d) => {
                let mut r = S::infinity();
                for v in &d.vertices {
                    r = r.min(norm(v));
                }
                r
            }
        }
    }

    /// Largest `|X|` on the surface; `None` when unbounded.
    pub fn outer_radius(&self) -> Option<S> {
        match &self.kind {
            SurfaceKind::Plane(_) | SurfaceKind::RoundCylinder(_) => None,
            SurfaceKind::RoundSphere(s) => Some(s.radius),
            SurfaceKind::GraphPatch(g) => {
                let mut r = S::zero();
                for s in g.samples.iter().flatten() {
                    r = r.max(s.radius());
                }
                Some(r)
            }
            SurfaceKind::TriangleMesh(d) => {
                let mut r = S::zero();
                for v in &d.vertices {
                    r = r.max(norm(v));
                }
                Some(r)
            }
            SurfaceKind::PolylineCurve(d) => {
                let mut r = S::zero();
                for v in &d.vertices {
                    r = r.max(norm(v));
                }
                Some(r)
            }
        }
    }

    pub fn is_compact(&self) -> bool {
        self.outer_radius().is_some()
    }

    /// Whether the analytic parameters satisfy the shrinker equation
    /// exactly: any plane through the origin, `S^n(sqrt(2n))`, or
    /// `S^k(sqrt(2k)) x R^{n-k}`. Discrete kinds return `false`; use the
    /// measured residual instead.
    pub fn is_exact_shrinker(&self) -> bool {
        let tol = S::lit(1e-12);
        match &self.kind {
            SurfaceKind::Plane(_) => true,
            SurfaceKind::RoundSphere(s) => {
                (s.radius - (S::two() * S::of_usize(self.n)).sqrt()).abs() < tol
            }
            SurfaceKind::RoundCylinder(c) => {
                (c.radius - (S::two() * S::of_usize(c.sphere_dim)).sqrt()).abs() < tol
            }
            _ => false,
        }
    }

    // ----- pointwise geometry --------------------------------------------

    /// Pointwise geometry at an ambient point (analytic kinds) or a node
    /// index (discrete kinds).
    pub fn sample_geometry(&self, location: &Location<S>) -> Result<GeometrySample<S>> {
        match (&self.kind, location) {
            (SurfaceKind::Plane(p), Location::Ambient(x)) => {
                self.check_ambient_len(x)?;
                let proj = project_onto_span(&p.basis, x);
                if norm(&sub(x, &proj)) > S::lit(1e-9) * (S::one() + norm(x)) {
                    return Err(Error::OutOfDomain("point not on the plane".into()));
                }
                if norm(x) < p.inner_radius * (S::one() - S::lit(1e-12)) {
                    return Err(Error::OutOfDomain(
                        "point inside the excluded ball of the exterior plane".into(),
                    ));
                }
                Ok(plane_sample(p, x.clone(), S::one()))
            }
            (SurfaceKind::RoundSphere(s), Location::Ambient(x)) => {
                self.check_ambient_len(x)?;
                let r = norm(x);
                if (r - s.radius).abs() > S::lit(1e-9) * (S::one() + s.radius) {
                    return Err(Error::OutOfDomain("point not on the sphere".into()));
                }
                for &c in x.iter().skip(self.n + 1) {
                    if c.abs() > S::lit(1e-9) * (S::one() + s.radius) {
                        return Err(Error::OutOfDomain(
                            "point outside the sphere's coordinate subspace".into(),
                        ));
                    }
                }
                sphere_sample(s.radius, self.n, self.ambient_dim(), x.clone(), S::one())
            }
            (SurfaceKind::RoundCylinder(c), Location::Ambient(x)) => {
                self.check_ambient_len(x)?;
                let k = c.sphere_dim;
                let rs = norm(&x[..=k]);
                if (rs - c.radius).abs() > S::lit(1e-9) * (S::one() + c.radius) {
                    return Err(Error::OutOfDomain(
                        "sphere-factor radius does not match the cylinder".into(),
                    ));
                }
                for &v in x.iter().skip(self.n + 1) {
                    if v.abs() > S::lit(1e-9) * (S::one() + c.radius) {
                        return Err(Error::OutOfDomain(
                            "point outside the cylinder's coordinate subspace".into(),
                        ));
                    }
                }
                if c.inner_radius > S::zero() && norm(x) < c.inner_radius * (S::one() - S::lit(1e-12)) {
                    return Err(Error::OutOfDomain(
                        "point inside the excluded ball of the exterior cylinder".into(),
                    ));
                }
                cylinder_sample(c, self.n, self.ambient_dim(), x.clone(), S::one())
            }
            (SurfaceKind::TriangleMesh(d), Location::Node(v)) => d
                .samples
                .get(*v)
                .cloned()
                .ok_or_else(|| Error::OutOfDomain(format!("vertex {v} out of range"))),
            (SurfaceKind::PolylineCurve(d), Location::Node(v)) => d
                .samples
                .get(*v)
                .cloned()
                .ok_or_else(|| Error::OutOfDomain(format!("vertex {v} out of range"))),
            (SurfaceKind::GraphPatch(d), Location::Node(v)) => d
                .samples
                .get(*v)
                .cloned()
                .flatten()
                .ok_or_else(|| Error::OutOfDomain(format!("grid node {v} is not active"))),
            _ => Err(Error::OutOfDomain(
                "location kind does not match the surface kind".into(),
            )),
        }
    }

    fn check_ambient_len(&self, x: &[S]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::OutOfDomain(format!(
                "ambient point has dimension {}, surface lives in R^{}",
                x.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }
}

// ----- analytic pointwise geometry ---------------------------------------

pub(crate) fn plane_sample<S: Real>(p: &PlaneData<S>, x: Vec<S>, weight: S) -> GeometrySample<S> {
    let dim = x.len();
    GeometrySample::from_frame(
        x,
        p.basis.clone(),
        vec![S::zero(); dim],
        S::zero(),
        weight,
    )
}

pub(crate) fn sphere_sample<S: Real>(
    radius: S,
    n: usize,
    ambient: usize,
    x: Vec<S>,
    weight: S,
) -> Result<GeometrySample<S>> {
    // Tangent frame: orthogonal complement of the radial direction inside the
    // sphere's coordinate subspace R^{n+1}.
    let dir: Vec<S> = x[..=n].iter().map(|&v| v / radius).collect();
    let frame_sub = complete_frame(&dir, n + 1)?;
    let tangent: Vec<Vec<S>> = frame_sub
        .into_iter()
        .map(|t| embed(&t, ambient))
        .collect();
    let h = scale(&x, -S::of_usize(n) / (radius * radius));
    let b_norm = S::of_usize(n).sqrt() / radius;
    Ok(GeometrySample::from_frame(x, tangent, h, b_norm, weight))
}

pub(crate) fn cylinder_sample<S: Real>(
    c: &CylinderData<S>,
    n: usize,
    ambient: usize,
    x: Vec<S>,
    weight: S,
) -> Result<GeometrySample<S>> {
    let k = c.sphere_dim;
    let dir: Vec<S> = x[..=k].iter().map(|&v| v / c.radius).collect();
    let sphere_tangents = complete_frame(&dir, k + 1)?;
    let mut tangent: Vec<Vec<S>> = sphere_tangents
        .into_iter()
        .map(|t| embed(&t, ambient))
        .collect();
    for axis in (k + 1)..=n {
        let mut e = vec![S::zero(); ambient];
        e[axis] = S::one();
        tangent.push(e);
    }
    let mut h = vec![S::zero(); ambient];
    let coeff = -S::of_usize(k) / (c.radius * c.radius);
    for i in 0..=k {
        h[i] = coeff * x[i];
    }
    let b_norm = S::of_usize(k).sqrt() / c.radius;
    Ok(GeometrySample::from_frame(x, tangent, h, b_norm, weight))
}

fn graph_node_sample<S: Real>(g: &GraphFunction<S>, node: usize) -> Result<GeometrySample<S>> {
    let m = g.components();
    let ambient = 2 + m;
    let [x0, x1] = g.node_position(node);
    let mut position = vec![S::zero(); ambient];
    position[0] = x0;
    position[1] = x1;
    for alpha in 0..m {
        position[2 + alpha] = g.value(node, alpha);
    }
    let mut t0 = vec![S::zero(); ambient];
    let mut t1 = vec![S::zero(); ambient];
    t0[0] = S::one();
    t1[1] = S::one();
    let mut s00 = vec![S::zero(); ambient];
    let mut s01 = vec![S::zero(); ambient];
    let mut s11 = vec![S::zero(); ambient];
    for alpha in 0..m {
        let d = g.du(node, alpha);
        t0[2 + alpha] = d[0];
        t1[2 + alpha] = d[1];
        let dd = g.d2u(node, alpha);
        s00[2 + alpha] = dd[0];
        s01[2 + alpha] = dd[1];
        s11[2 + alpha] = dd[2];
    }
    let det = g.metric_det(node);
    if !(det > S::zero()) {
        return Err(Error::Precondition {
            what: format!("singular induced metric at node {node}"),
            measured: 0.0,
        });
    }
    let weight = g.spacing() * g.spacing() * det.sqrt();
    immersion_pointwise(position, vec![t0, t1], vec![s00, s01, s11], weight)
        .map_err(|e| match e {
            Error::DegenerateFit { detail, .. } => Error::DegenerateFit { element: node, detail },
            other => other,
        })
}

// ----- small vector helpers ------------------------------------------------

pub(crate) fn embed<S: Real>(v: &[S], ambient: usize) -> Vec<S> {
    let mut out = vec![S::zero(); ambient];
    out[..v.len()].copy_from_slice(v);
    out
}

pub(crate) fn project_onto_span<S: Real>(basis: &[Vec<S>], x: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); x.len()];
    for e in basis {
        axpy(&mut out, dot(x, e), e);
    }
    out
}

/// Complete the unit vector `dir` (length `dim`) to an orthonormal basis of
/// `R^dim` and return the `dim - 1` complement vectors.
pub(crate) fn complete_frame<S: Real>(dir: &[S], dim: usize) -> Result<Vec<Vec<S>>> {
    debug_assert_eq!(dir.len(), dim);
    let mut frame: Vec<Vec<S>> = vec![dir.to_vec()];
    for i in 0..dim {
        if frame.len() == dim {
            break;
        }
        let mut v = vec![S::zero(); dim];
        v[i] = S::one();
        for f in &frame {
            let c = dot(&v, f);
            for (a, b) in v.iter_mut().zip(f) {
                *a -= c * *b;
            }
        }
        let len = norm(&v);
        if len > S::lit(1e-8) {
            for a in v.iter_mut() {
                *a /= len;
            }
            frame.push(v);
        }
    }
    if frame.len() != dim {
        return Err(Error::DegenerateFit {
            element: 0,
            detail: "failed to complete orthonormal frame".into(),
        });
    }
    frame.remove(0);
    Ok(frame)
}

pub(crate) fn triangle_area<S: Real>(a: &[S], b: &[S], c: &[S]) -> S {
    let u = sub(b, a);
    let v = sub(c, a);
    let uu = norm_sq(&u);
    let vv = norm_sq(&v);
    let uv = dot(&u, &v);
    let g = uu * vv - uv * uv;
    if g <= S::zero() {
        S::zero()
    } else {
        g.sqrt() * S::half()
    }
}

fn bounding_scale<S: Real>(vertices: &[Vec<S>]) -> S {
    let dim = vertices[0].len();
    let mut lo = vec![S::infinity(); dim];
    let mut hi = vec![S::neg_infinity(); dim];
    for v in vertices {
        for d in 0..dim {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let mut s = S::zero();
    for d in 0..dim {
        s = s.max(hi[d] - lo[d]);
    }
    s.max(S::lit(1e-30))
}

/// Builtin height profile used by catalog fixtures.
pub fn radial_height_fn<S: Real>(a: S, b: S) -> Arc<dyn Fn(S, S) -> Vec<S> + Send + Sync> {
    Arc::new(move |x: S, y: S| {
        let r = (x * x + y * y).sqrt();
        vec![a * r + b / r]
    })
}
