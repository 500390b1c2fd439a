//! One-step uniform refinement of discrete surfaces.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::geom::surface::{Projection, ShrinkerSurface, SurfaceKind};
use crate::scalar::{norm, Real};

/// Outcome of a refinement request.
#[derive(Debug, Clone)]
pub struct Refined<S: Real> {
    pub surface: ShrinkerSurface<S>,
    /// Set when the input was analytic and returned unchanged.
    pub notice: Option<String>,
}

impl<S: Real> ShrinkerSurface<S> {
    /// Subdivide each element once. Analytic kinds are returned unchanged
    /// with a notice; discrete kinds carrying a projection are snapped back
    /// to their analytic model.
    pub fn refine(&self) -> Result<Refined<S>> {
        match self.kind() {
            SurfaceKind::TriangleMesh(d) => {
                let mut vertices = d.vertices.clone();
                let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
                let mut faces = Vec::with_capacity(d.faces.len() * 4);
                let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec<S>>| -> usize {
                    let key = (a.min(b), a.max(b));
                    if let Some(&v) = midpoint.get(&key) {
                        return v;
                    }
                    let p: Vec<S> = vertices[a]
                        .iter()
                        .zip(&vertices[b])
                        .map(|(x, y)| (*x + *y) * S::half())
                        .collect();
                    let p = project(&p, d.projection.as_ref());
                    vertices.push(p);
                    let v = vertices.len() - 1;
                    midpoint.insert(key, v);
                    v
                };
                for f in &d.faces {
                    let ab = mid(f[0], f[1], &mut vertices);
                    let bc = mid(f[1], f[2], &mut vertices);
                    let ca = mid(f[2], f[0], &mut vertices);
                    faces.push([f[0], ab, ca]);
                    faces.push([f[1], bc, ab]);
                    faces.push([f[2], ca, bc]);
                    faces.push([ab, bc, ca]);
                }
                let surface = ShrinkerSurface::triangle_mesh(
                    &self.id,
                    vertices,
                    faces,
                    d.projection,
                )?;
                Ok(Refined {
                    surface,
                    notice: None,
                })
            }
            SurfaceKind::PolylineCurve(d) => {
                let count = d.vertices.len();
                let segs = if d.closed { count } else { count - 1 };
                let mut vertices = Vec::with_capacity(count + segs);
                for i in 0..count {
                    vertices.push(d.vertices[i].clone());
                    if i + 1 < count || d.closed {
                        let j = (i + 1) % count;
                        let p: Vec<S> = d.vertices[i]
                            .iter()
                            .zip(&d.vertices[j])
                            .map(|(x, y)| (*x + *y) * S::half())
                            .collect();
                        vertices.push(project(&p, d.projection.as_ref()));
                    }
                }
                let surface =
                    ShrinkerSurface::polyline(&self.id, vertices, d.closed, d.projection)?;
                Ok(Refined {
                    surface,
                    notice: None,
                })
            }
            SurfaceKind::GraphPatch(d) => {
                let fine = d.function.refined()?;
                let surface = ShrinkerSurface::graph_patch(&self.id, fine)?;
                Ok(Refined {
                    surface,
                    notice: None,
                })
            }
            _ => Ok(Refined {
                surface: self.clone(),
                notice: Some(format!(
                    "surface `{}` is analytic; refinement is a no-op",
                    self.id
                )),
            }),
        }
    }
}

fn project<S: Real>(p: &[S], projection: Option<&Projection<S>>) -> Vec<S> {
    match projection {
        None => p.to_vec(),
        Some(Projection::Sphere { radius }) => {
            let r = norm(p);
            if r <= S::zero() {
                return p.to_vec();
            }
            p.iter().map(|&x| x * *radius / r).collect()
        }
        Some(Projection::Cylinder { sphere_dim, radius }) => {
            let k = *sphere_dim;
            let mut out = p.to_vec();
            let r = norm(&p[..=k]);
            if r > S::zero() {
                for x in out[..=k].iter_mut() {
                    *x = *x * *radius / r;
                }
            }
            out
        }
    }
}
