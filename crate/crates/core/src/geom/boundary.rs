//! Integration over the boundary `∂M` with the outward conormal.
//!
//! The conormal convention is outward from `M`: on the exterior plane
//! `P \ B_R` it points toward the origin, so `<X^T, nu> = -R` there; that
//! closed form anchors the sign convention for everything else.

use crate::error::{Error, Result};
use crate::geom::quad::{Integral, QuadratureSpec, Weighting};
use crate::geom::sample::GeometrySample;
use crate::geom::surface::{cylinder_sample, plane_sample, ShrinkerSurface, SurfaceKind};
use crate::numerics::CompensatedSum;
use crate::scalar::{norm, sub, Real};

impl<S: Real> ShrinkerSurface<S> {
    /// Integrate `f(sample, conormal)` over `∂M`; closed surfaces return 0.
    pub fn boundary_integrate<F: Fn(&GeometrySample<S>, &[S]) -> S>(
        &self,
        weighting: Weighting<S>,
        quad: &QuadratureSpec<S>,
        f: F,
    ) -> Result<Integral<S>> {
        let mut prev: Option<S> = None;
        let mut out = Integral {
            value: S::zero(),
            abs_err: S::zero(),
            level: 0,
            truncated_domain: false,
        };
        for level in 0..=quad.max_depth {
            let value = self.boundary_level(weighting, level, &f)?;
            if let Some(p) = prev {
                let err = (value - p).abs();
                out = Integral {
                    value,
                    abs_err: err,
                    level,
                    truncated_domain: false,
                };
                if err <= quad.tol * value.abs().max(S::min_positive_value()) || err == S::zero() {
                    return Ok(out);
                }
            } else {
                out.value = value;
            }
            prev = Some(value);
            if self.boundary_is_discrete() {
                out.abs_err = S::zero();
                return Ok(out);
            }
        }
        Ok(out)
    }

    fn boundary_is_discrete(&self) -> bool {
        matches!(
            self.kind(),
            SurfaceKind::TriangleMesh(_) | SurfaceKind::PolylineCurve(_)
        )
    }

    fn boundary_level<F: Fn(&GeometrySample<S>, &[S]) -> S>(
        &self,
        weighting: Weighting<S>,
        level: u32,
        f: &F,
    ) -> Result<S> {
        let gaussian = |r_sq: S| -> S {
            match weighting {
                Weighting::Lebesgue => S::one(),
                Weighting::Gaussian(t) => (-r_sq / (S::four() * t)).exp(),
            }
        };
        let n = self.dimension();
        let ambient = self.ambient_dim();
        let mut acc = CompensatedSum::new();
        match self.kind() {
            SurfaceKind::Plane(p) => {
                let r0 = p.inner_radius;
                if r0 <= S::zero() {
                    return Ok(S::zero());
                }
                match n {
                    1 => {
                        // Two boundary points at +-R along the line.
                        for sign in [S::one(), -S::one()] {
                            let x: Vec<S> = p.basis[0].iter().map(|&b| b * r0 * sign).collect();
                            let nu: Vec<S> =
                                p.basis[0].iter().map(|&b| -b * sign).collect();
                            let sample = plane_sample(p, x, S::one());
                            acc.add(gaussian(sample.radius_sq()) * f(&sample, &nu));
                        }
                    }
                    2 => {
                        let count = (96usize << level).min(6144);
                        let w = S::two() * S::PI() / S::of_usize(count);
                        for j in 0..count {
                            let theta = (S::of_usize(j) + S::half()) * w;
                            let (c, s) = (theta.cos(), theta.sin());
                            let mut x = vec![S::zero(); ambient];
                            let mut nu = vec![S::zero(); ambient];
                            for (xi, (b0, b1)) in x
                                .iter_mut()
                                .zip(p.basis[0].iter().zip(p.basis[1].iter()))
                            {
                                *xi = r0 * (c * *b0 + s * *b1);
                            }
                            for (ni, (b0, b1)) in nu
                                .iter_mut()
                                .zip(p.basis[0].iter().zip(p.basis[1].iter()))
                            {
                                *ni = -(c * *b0 + s * *b1);
                            }
                            let sample = plane_sample(p, x, S::one());
                            acc.add(w * r0 * gaussian(sample.radius_sq()) * f(&sample, &nu));
                        }
                    }
                    _ => {
                        return Err(Error::Unsupported(
                            "plane boundary quadrature implemented for n <= 2".into(),
                        ))
                    }
                }
                Ok(acc.value())
            }
            SurfaceKind::RoundCylinder(c) => {
                if c.inner_radius <= S::zero() {
                    return Ok(S::zero());
                }
                let axis_dim = n - c.sphere_dim;
                if axis_dim != 1 {
                    return Err(Error::Unsupported(
                        "cylinder boundary quadrature needs an axis of dimension 1".into(),
                    ));
                }
                let k = c.sphere_dim;
                let y0_sq = c.inner_radius * c.inner_radius - c.radius * c.radius;
                if y0_sq <= S::zero() {
                    return Err(Error::InvalidSurface(
                        "exterior cylinder boundary radius below the sphere radius".into(),
                    ));
                }
                let y0 = y0_sq.sqrt();
                let count = (96usize << level).min(6144);
                match k {
                    1 => {
                        let w = S::two() * S::PI() / S::of_usize(count);
                        for sign in [S::one(), -S::one()] {
                            let mut nu = vec![S::zero(); ambient];
                            nu[k + 1] = -sign;
                            for j in 0..count {
                                let theta = (S::of_usize(j) + S::half()) * w;
                                let omega = [theta.cos(), theta.sin()];
                                let mut x = vec![S::zero(); ambient];
                                x[0] = c.radius * omega[0];
                                x[1] = c.radius * omega[1];
                                x[k + 1] = sign * y0;
                                let sample = cylinder_sample(c, n, ambient, x, S::one())?;
                                acc.add(
                                    w * c.radius
                                        * gaussian(sample.radius_sq())
                                        * f(&sample, &nu),
                                );
                            }
                        }
                        Ok(acc.value())
                    }
                    _ => Err(Error::Unsupported(
                        "cylinder boundary quadrature implemented for k = 1".into(),
                    )),
                }
            }
            SurfaceKind::RoundSphere(_) => Ok(S::zero()),
            SurfaceKind::TriangleMesh(d) => {
                let conormal: std::collections::BTreeMap<usize, &Vec<S>> =
                    d.boundary_conormals.iter().map(|(v, nu)| (*v, nu)).collect();
                for e in &d.boundary_edges {
                    let len = norm(&sub(&d.vertices[e[1]], &d.vertices[e[0]]));
                    for &v in e {
                        if let Some(nu) = conormal.get(&v) {
                            let s = &d.samples[v];
                            acc.add(
                                len * S::half() * gaussian(s.radius_sq()) * f(s, nu),
                            );
                        }
                    }
                }
                Ok(acc.value())
            }
            SurfaceKind::PolylineCurve(d) => {
                if d.closed {
                    return Ok(S::zero());
                }
                let last = d.vertices.len() - 1;
                for (v, inward) in [(0usize, 1usize), (last, last - 1)] {
                    let s = &d.samples[v];
                    let dir = sub(&d.vertices[v], &d.vertices[inward]);
                    let t = &s.tangent[0];
                    let sign = if crate::scalar::dot(&dir, t) >= S::zero() {
                        S::one()
                    } else {
                        -S::one()
                    };
                    let nu: Vec<S> = t.iter().map(|&x| x * sign).collect();
                    acc.add(gaussian(s.radius_sq()) * f(s, &nu));
                }
                Ok(acc.value())
            }
            SurfaceKind::GraphPatch(_) => Err(Error::Unsupported(
                "graph patches carry truncation edges, not spherical boundaries".into(),
            )),
        }
    }

    /// `(n-1)`-dimensional measure of `∂M`.
    pub fn boundary_measure(&self, quad: &QuadratureSpec<S>) -> Result<S> {
        Ok(self
            .boundary_integrate(Weighting::Lebesgue, quad, |_, _| S::one())?
            .value)
    }
}
