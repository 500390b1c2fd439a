//! Blow-down rescaling `M_t = t^{-1} M`, radial mass profiles whose
//! `r`-constancy characterizes cones, and cross-section comparison across
//! scales.

use crate::error::{Error, Result};
use crate::functionals::eval_xi;
use crate::geom::{
    Projection, QuadratureSpec, Region, ShrinkerSurface, SurfaceKind, Weighting,
};
use crate::scalar::{norm, Real};
use crate::testfn::HomogeneousTestFunction;

/// Exact rescaling `t^{-1} M`.
pub fn rescale<S: Real>(surface: &ShrinkerSurface<S>, t: S) -> Result<ShrinkerSurface<S>> {
    if !(t > S::zero()) {
        return Err(Error::Precondition {
            what: "rescale needs t > 0".into(),
            measured: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let inv = S::one() / t;
    let id = surface.id.clone();
    match surface.kind() {
        SurfaceKind::Plane(p) => {
            if p.inner_radius > S::zero() {
                ShrinkerSurface::exterior_plane(&id, p.basis.clone(), surface.codimension(), p.inner_radius * inv)
            } else {
                ShrinkerSurface::plane(&id, p.basis.clone(), surface.codimension())
            }
        }
        SurfaceKind::RoundSphere(s) => ShrinkerSurface::sphere(
            &id,
            surface.dimension(),
            surface.codimension(),
            s.radius * inv,
        ),
        SurfaceKind::RoundCylinder(c) => {
            if c.inner_radius > S::zero() {
                ShrinkerSurface::exterior_cylinder(
                    &id,
                    c.sphere_dim,
                    surface.dimension(),
                    surface.codimension(),
                    c.radius * inv,
                    c.inner_radius * inv,
                )
            } else {
                ShrinkerSurface::cylinder(
                    &id,
                    c.sphere_dim,
                    surface.dimension(),
                    surface.codimension(),
                    c.radius * inv,
                )
            }
        }
        SurfaceKind::TriangleMesh(d) => {
            let vertices: Vec<Vec<S>> = d
                .vertices
                .iter()
                .map(|v| v.iter().map(|&x| x * inv).collect())
                .collect();
            ShrinkerSurface::triangle_mesh(&id, vertices, d.faces.clone(), scale_projection(d.projection, inv))
        }
        SurfaceKind::PolylineCurve(d) => {
            let vertices: Vec<Vec<S>> = d
                .vertices
                .iter()
                .map(|v| v.iter().map(|&x| x * inv).collect())
                .collect();
            ShrinkerSurface::polyline(&id, vertices, d.closed, scale_projection(d.projection, inv))
        }
        SurfaceKind::GraphPatch(d) => {
            ShrinkerSurface::graph_patch(&id, d.function.rescaled(t))
        }
    }
}

fn scale_projection<S: Real>(p: Option<Projection<S>>, inv: S) -> Option<Projection<S>> {
    p.map(|p| match p {
        Projection::Sphere { radius } => Projection::Sphere { radius: radius * inv },
        Projection::Cylinder { sphere_dim, radius } => Projection::Cylinder {
            sphere_dim,
            radius: radius * inv,
        },
    })
}

/// One entry of a radial mass profile.
#[derive(Debug, Clone)]
pub struct ProfilePoint<S: Real> {
    pub r: S,
    /// `r^{-n} int_{M cap B_r} phi dmu`; `None` when the ball misses the
    /// surface entirely.
    pub value: Option<S>,
    pub note: Option<String>,
}

/// `r^{-n} int_{M cap B_r} phi dmu` on an ascending radius grid.
pub fn radial_mass_profile<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    radii: &[S],
    quad: &QuadratureSpec<S>,
) -> Result<Vec<ProfilePoint<S>>> {
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|&r| !(r > S::zero())) {
        return Err(Error::Precondition {
            what: "radius grid must be positive ascending".into(),
            measured: f64::NAN,
        });
    }
    let n = surface.dimension();
    let inner = surface.inner_radius();
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        if r <= inner {
            out.push(ProfilePoint {
                r,
                value: None,
                note: Some(format!(
                    "ball of radius {r} lies inside the surface's inner radius {inner}; skipped"
                )),
            });
            continue;
        }
        let cutoff = S::lit(1e-9);
        let integral = surface.integrate(Weighting::Lebesgue, &Region::Ball(r), quad, |s| {
            let rr = s.radius();
            if rr < cutoff {
                return S::zero();
            }
            let xi: Vec<S> = s.position.iter().map(|&v| v / rr).collect();
            phi.eval_unit(&xi)
        })?;
        out.push(ProfilePoint {
            r,
            value: Some(integral.value / r.powi(n as i32)),
            note: None,
        });
    }
    Ok(out)
}

/// Points of the normalized cross-section `(M ∩ ∂B_r) / r` on the unit
/// sphere. `seed` jitters the sampling angles deterministically.
pub fn cross_section<S: Real>(
    surface: &ShrinkerSurface<S>,
    r: S,
    sample_count: usize,
    seed: u64,
) -> Result<Vec<Vec<S>>> {
    let jitter = splitmix_unit(seed);
    let scale_err = || Error::EmptyCrossSection {
        scale: r.to_f64().unwrap_or(f64::NAN),
    };
    let ambient = surface.ambient_dim();
    let mut points: Vec<Vec<S>> = Vec::new();
    match surface.kind() {
        SurfaceKind::Plane(p) => {
            if r < p.inner_radius {
                return Err(scale_err());
            }
            match surface.dimension() {
                1 => {
                    for sign in [S::one(), -S::one()] {
                        points.push(p.basis[0].iter().map(|&b| b * sign).collect());
                    }
                }
                2 => {
                    for j in 0..sample_count.max(3) {
                        let theta = S::two() * S::PI()
                            * ((S::of_usize(j) + S::lit(jitter)) / S::of_usize(sample_count.max(3)));
                        let mut x = vec![S::zero(); ambient];
                        for (xi, (b0, b1)) in x
                            .iter_mut()
                            .zip(p.basis[0].iter().zip(p.basis[1].iter()))
                        {
                            *xi = theta.cos() * *b0 + theta.sin() * *b1;
                        }
                        points.push(x);
                    }
                }
                _ => {
                    return Err(Error::Unsupported(
                        "cross-sections implemented for n <= 2".into(),
                    ))
                }
            }
        }
        SurfaceKind::RoundSphere(s) => {
            if (s.radius - r).abs() > S::lit(1e-9) * (S::one() + r) {
                return Err(scale_err());
            }
            match surface.dimension() {
                1 => {
                    for j in 0..sample_count.max(3) {
                        let theta = S::two() * S::PI()
                            * ((S::of_usize(j) + S::lit(jitter)) / S::of_usize(sample_count.max(3)));
                        let mut x = vec![S::zero(); ambient];
                        x[0] = theta.cos();
                        x[1] = theta.sin();
                        points.push(x);
                    }
                }
                2 => {
                    // Fibonacci lattice on S^2.
                    let count = sample_count.max(8);
                    let golden = (S::one() + S::lit(5.0).sqrt()) * S::half();
                    for j in 0..count {
                        let z = S::one()
                            - S::two() * (S::of_usize(j) + S::half()) / S::of_usize(count);
                        let rho = (S::one() - z * z).max(S::zero()).sqrt();
                        let theta = S::two() * S::PI()
                            * (S::of_usize(j) / golden + S::lit(jitter));
                        let mut x = vec![S::zero(); ambient];
                        x[0] = rho * theta.cos();
                        x[1] = rho * theta.sin();
                        x[2] = z;
                        points.push(x);
                    }
                }
                _ => {
                    return Err(Error::Unsupported(
                        "cross-sections implemented for n <= 2".into(),
                    ))
                }
            }
        }
        SurfaceKind::RoundCylinder(c) => {
            let k = c.sphere_dim;
            if k != 1 || surface.dimension() - k != 1 {
                return Err(Error::Unsupported(
                    "cylinder cross-sections implemented for k = 1, axis dimension 1".into(),
                ));
            }
            let min_r = c.radius.max(c.inner_radius);
            if r < min_r * (S::one() - S::lit(1e-12)) {
                return Err(scale_err());
            }
            let y_sq = (r * r - c.radius * c.radius).max(S::zero());
            let y = y_sq.sqrt();
            let half = (sample_count / 2).max(3);
            for sign in [S::one(), -S::one()] {
                for j in 0..half {
                    let theta = S::two() * S::PI()
                        * ((S::of_usize(j) + S::lit(jitter)) / S::of_usize(half));
                    let mut x = vec![S::zero(); ambient];
                    x[0] = c.radius * theta.cos() / r;
                    x[1] = c.radius * theta.sin() / r;
                    x[2] = sign * y / r;
                    points.push(x);
                }
            }
        }
        SurfaceKind::TriangleMesh(d) => {
            let mut seen = std::collections::BTreeSet::new();
            for f in &d.faces {
                for e in 0..3 {
                    let a = f[e];
                    let b = f[(e + 1) % 3];
                    let key = (a.min(b), a.max(b));
                    if !seen.insert(key) {
                        continue;
                    }
                    let ra = norm(&d.vertices[a]);
                    let rb = norm(&d.vertices[b]);
                    if (ra - r) * (rb - r) < S::zero() {
                        let w = (r - ra) / (rb - ra);
                        let p: Vec<S> = d.vertices[a]
                            .iter()
                            .zip(&d.vertices[b])
                            .map(|(x, y)| *x + w * (*y - *x))
                            .collect();
                        let len = norm(&p);
                        points.push(p.iter().map(|&x| x / len).collect());
                    }
                }
            }
        }
        SurfaceKind::PolylineCurve(d) => {
            let count = d.vertices.len();
            let segs = if d.closed { count } else { count - 1 };
            for i in 0..segs {
                let a = &d.vertices[i];
                let b = &d.vertices[(i + 1) % count];
                let ra = norm(a);
                let rb = norm(b);
                if (ra - r) * (rb - r) < S::zero() {
                    let w = (r - ra) / (rb - ra);
                    let p: Vec<S> = a.iter().zip(b).map(|(x, y)| *x + w * (*y - *x)).collect();
                    let len = norm(&p);
                    points.push(p.iter().map(|&x| x / len).collect());
                }
            }
        }
        SurfaceKind::GraphPatch(d) => {
            let (r_in, r_out) = d.function.radii();
            let m = d.function.components();
            for j in 0..sample_count.max(8) {
                let theta = S::two() * S::PI()
                    * ((S::of_usize(j) + S::lit(jitter)) / S::of_usize(sample_count.max(8)));
                let dir = [theta.cos(), theta.sin()];
                // |(s dir, u(s dir))| - r is monotone enough to bisect.
                let radius_at = |s: S| -> Result<S> {
                    let mut sq = s * s;
                    for alpha in 0..m {
                        let jet = d.function.interpolate(s * dir[0], s * dir[1], alpha)?;
                        sq += jet.value * jet.value;
                    }
                    Ok(sq.sqrt())
                };
                let pad = d.function.spacing() * S::four();
                let (mut lo, mut hi) = (r_in + pad, r_out - pad);
                let f_lo = match radius_at(lo) {
                    Ok(v) => v - r,
                    Err(_) => continue,
                };
                let f_hi = match radius_at(hi) {
                    Ok(v) => v - r,
                    Err(_) => continue,
                };
                if f_lo * f_hi > S::zero() {
                    continue;
                }
                for _ in 0..80 {
                    let mid = (lo + hi) * S::half();
                    let fm = match radius_at(mid) {
                        Ok(v) => v - r,
                        Err(_) => break,
                    };
                    if fm * f_lo <= S::zero() {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let s = (lo + hi) * S::half();
                let mut x = vec![S::zero(); ambient];
                x[0] = s * dir[0];
                x[1] = s * dir[1];
                for alpha in 0..m {
                    x[2 + alpha] = d.function.interpolate(x[0], x[1], alpha)?.value;
                }
                let len = norm(&x);
                points.push(x.iter().map(|&v| v / len).collect());
            }
        }
    }
    if points.is_empty() {
        return Err(scale_err());
    }
    Ok(points)
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff<S: Real>(a: &[Vec<S>], b: &[Vec<S>]) -> S {
    let one_sided = |from: &[Vec<S>], to: &[Vec<S>]| -> S {
        let mut worst = S::zero();
        for p in from {
            let mut best = S::infinity();
            for q in to {
                let mut d = S::zero();
                for (x, y) in p.iter().zip(q) {
                    let v = *x - *y;
                    d += v * v;
                }
                best = best.min(d);
            }
            worst = worst.max(best);
        }
        worst.sqrt()
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Cross-section distance between the blow-downs at two scales.
pub fn cone_deviation<S: Real>(
    surface: &ShrinkerSurface<S>,
    scales: (S, S),
    r: S,
    sample_count: usize,
    seed: u64,
) -> Result<S> {
    let a = rescale(surface, scales.0)?;
    let b = rescale(surface, scales.1)?;
    let sa = cross_section(&a, r, sample_count, seed)?;
    let sb = cross_section(&b, r, sample_count, seed)?;
    Ok(hausdorff(&sa, &sb))
}

/// Per-scale values of `Xi_1(M_{t_i}, phi) = Xi_{t_i^2}(M, phi)` and their
/// spread over the tail of the sequence.
#[derive(Debug, Clone)]
pub struct XiLimitReport<S: Real> {
    /// `(t_i, Xi_1(rescale(M, t_i), phi))`.
    pub values: Vec<(S, S)>,
    /// Largest identity gap `|Xi_1(M_{t_i}) - Xi_{t_i^2}(M)|` observed.
    pub scale_identity_gap: S,
    /// `max - min` over the tail half of the sequence.
    pub tail_spread: S,
}

pub fn xi_limit_consistency<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    scales: &[S],
    quad: &QuadratureSpec<S>,
) -> Result<XiLimitReport<S>> {
    if scales.len() < 2 || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition {
            what: "scale sequence must be ascending with at least two entries".into(),
            measured: f64::NAN,
        });
    }
    let mut values = Vec::with_capacity(scales.len());
    let mut gap = S::zero();
    for &t in scales {
        let rescaled = rescale(surface, t)?;
        let via_rescale = eval_xi(&rescaled, phi, S::one(), quad)?.value;
        let via_time = eval_xi(surface, phi, t * t, quad)?.value;
        gap = gap.max((via_rescale - via_time).abs());
        values.push((t, via_rescale));
    }
    let tail_start = scales.len() / 2;
    let tail = &values[tail_start..];
    let mut lo = S::infinity();
    let mut hi = S::neg_infinity();
    for (_, v) in tail {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    Ok(XiLimitReport {
        values,
        scale_identity_gap: gap,
        tail_spread: hi - lo,
    })
}

/// Bundle of the cone diagnostics for one surface.
#[derive(Debug, Clone)]
pub struct ConeReport<S: Real> {
    pub scales: Vec<S>,
    /// Per-scale normalized cross-sections at the probe radius.
    pub cross_sections: Vec<Vec<Vec<S>>>,
    /// `(phi id, profile values over the radius grid)`.
    pub profiles: Vec<(String, Vec<ProfilePoint<S>>)>,
    /// Max cross-section distance over consecutive scales.
    pub deviation: S,
    /// Profiles are `r`-constant within tolerance.
    pub profile_constant: bool,
    /// Both diagnostics agree with a cone.
    pub verdict_cone: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn cone_report<S: Real>(
    surface: &ShrinkerSurface<S>,
    scales: &[S],
    probe_radius: S,
    sample_count: usize,
    seed: u64,
    phis: &[HomogeneousTestFunction<S>],
    radii: &[S],
    quad: &QuadratureSpec<S>,
    tol: S,
) -> Result<ConeReport<S>> {
    let mut cross_sections = Vec::with_capacity(scales.len());
    for &t in scales {
        let m = rescale(surface, t)?;
        cross_sections.push(cross_section(&m, probe_radius, sample_count, seed)?);
    }
    let mut deviation = S::zero();
    for pair in cross_sections.windows(2) {
        deviation = deviation.max(hausdorff(&pair[0], &pair[1]));
    }
    let mut profiles = Vec::new();
    let mut profile_constant = true;
    for phi in phis {
        let profile = radial_mass_profile(surface, phi, radii, quad)?;
        let vals: Vec<S> = profile.iter().filter_map(|p| p.value).collect();
        if vals.len() >= 2 {
            let lo = vals.iter().cloned().fold(S::infinity(), S::min);
            let hi = vals.iter().cloned().fold(S::neg_infinity(), S::max);
            if hi - lo > tol {
                profile_constant = false;
            }
        }
        profiles.push((phi.id.clone(), profile));
    }
    Ok(ConeReport {
        scales: scales.to_vec(),
        cross_sections,
        profiles,
        deviation,
        profile_constant,
        verdict_cone: profile_constant && deviation <= tol.max(S::lit(1e-8)),
    })
}

fn splitmix_unit(seed: u64) -> f64 {
    let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z = z ^ (z >> 31);
    (z >> 11) as f64 / (1u64 << 53) as f64
}
