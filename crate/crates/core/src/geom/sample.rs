//! Pointwise geometric data attached to a surface location.

use crate::scalar::{dot, norm, norm_sq, Real};

/// Position, the tangential/normal splitting of the position vector, the
/// mean curvature vector, the full second-fundamental-form norm and the
/// local area weight at one point of an immersed submanifold.
#[derive(Debug, Clone)]
pub struct GeometrySample<S: Real> {
    /// Ambient position `X`.
    pub position: Vec<S>,
    /// Orthonormal tangent frame (`n` vectors).
    pub tangent: Vec<Vec<S>>,
    /// Tangential projection `X^T`.
    pub xt: Vec<S>,
    /// Normal projection `X^N`.
    pub xn: Vec<S>,
    /// Mean curvature vector `H`.
    pub mean_curvature: Vec<S>,
    /// Full norm `|B|` of the second fundamental form.
    pub b_norm: S,
    /// Local area element contribution (units `length^n`).
    pub weight: S,
}

impl<S: Real> GeometrySample<S> {
    /// Build a sample from a position, an orthonormal tangent frame, the
    /// mean curvature vector and `|B|`; the tangential/normal splitting is
    /// derived from the frame.
    pub fn from_frame(
        position: Vec<S>,
        tangent: Vec<Vec<S>>,
        mean_curvature: Vec<S>,
        b_norm: S,
        weight: S,
    ) -> Self {
        let mut xt = vec![S::zero(); position.len()];
        for e in &tangent {
            let c = dot(&position, e);
            for (t, v) in xt.iter_mut().zip(e) {
                *t += c * *v;
            }
        }
        let xn: Vec<S> = position.iter().zip(&xt).map(|(x, t)| *x - *t).collect();
        Self {
            position,
            tangent,
            xt,
            xn,
            mean_curvature,
            b_norm,
            weight,
        }
    }

    #[inline]
    pub fn radius(&self) -> S {
        norm(&self.position)
    }

    #[inline]
    pub fn radius_sq(&self) -> S {
        norm_sq(&self.position)
    }

    #[inline]
    pub fn xn_norm_sq(&self) -> S {
        norm_sq(&self.xn)
    }

    #[inline]
    pub fn h_norm(&self) -> S {
        norm(&self.mean_curvature)
    }

    /// Residual of the self-shrinker equation, `|H + X^N / 2|`.
    pub fn shrinker_defect(&self) -> S {
        let mut acc = S::zero();
        for (h, xn) in self.mean_curvature.iter().zip(&self.xn) {
            let d = *h + *xn * S::half();
            acc += d * d;
        }
        acc.sqrt()
    }

    /// Largest violation of the projection identities, relative to `|X|`.
    pub fn projection_defect(&self) -> S {
        let scale = self.radius().max(S::one());
        let mut worst = S::zero();
        for ((x, t), n) in self.position.iter().zip(&self.xt).zip(&self.xn) {
            worst = worst.max((*x - (*t + *n)).abs());
        }
        let cross = dot(&self.xt, &self.xn).abs();
        (worst / scale).max(cross / (scale * scale))
    }
}
