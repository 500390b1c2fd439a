//! Degree-zero homogeneous test functions on the ambient sphere.
//!
//! A test function is defined by its restriction to the unit sphere and
//! extended by `phi(X) = phi(X / |X|)`. The ambient gradient then satisfies
//! `|grad phi(X)| <= |phi|_1 / |X|`, which is what the derivative bounds
//! consume.

use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

/// Shape of a bundled test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestShape {
    /// `phi = 1`.
    Constant,
    /// `phi(xi) = xi_i`.
    Coordinate(usize),
    /// `phi(xi) = xi_i^2`.
    CoordinateSq(usize),
}

/// A degree-zero homogeneous test function with its sup norms.
#[derive(Debug, Clone)]
pub struct HomogeneousTestFunction<S: Real> {
    pub id: String,
    shape: TestShape,
    ambient: usize,
    norm0: S,
    norm1: S,
}

impl<S: Real> HomogeneousTestFunction<S> {
    pub fn constant(ambient: usize) -> Self {
        Self {
            id: "const".into(),
            shape: TestShape::Constant,
            ambient,
            norm0: S::one(),
            norm1: S::zero(),
        }
    }

    pub fn coordinate(ambient: usize, i: usize) -> Result<Self> {
        if i >= ambient {
            return Err(Error::OutOfDomain(format!(
                "coordinate {i} out of range for ambient dimension {ambient}"
            )));
        }
        Ok(Self {
            id: format!("xi{}", i + 1),
            shape: TestShape::Coordinate(i),
            ambient,
            norm0: S::one(),
            norm1: S::one(),
        })
    }

    pub fn coordinate_sq(ambient: usize, i: usize) -> Result<Self> {
        if i >= ambient {
            return Err(Error::OutOfDomain(format!(
                "coordinate {i} out of range for ambient dimension {ambient}"
            )));
        }
        Ok(Self {
            id: format!("xi{}sq", i + 1),
            shape: TestShape::CoordinateSq(i),
            ambient,
            norm0: S::one(),
            norm1: S::two(),
        })
    }

    /// The bundled set: constant, all coordinates, all squared coordinates.
    pub fn bundled(ambient: usize) -> Vec<Self> {
        let mut out = vec![Self::constant(ambient)];
        for i in 0..ambient {
            out.push(Self::coordinate(ambient, i).expect("index in range"));
        }
        for i in 0..ambient {
            out.push(Self::coordinate_sq(ambient, i).expect("index in range"));
        }
        out
    }

    /// Look up a bundled function by id.
    pub fn by_id(ambient: usize, id: &str) -> Result<Self> {
        Self::bundled(ambient)
            .into_iter()
            .find(|f| f.id == id)
            .ok_or_else(|| Error::OutOfDomain(format!("unknown test function `{id}`")))
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn norm0(&self) -> S {
        self.norm0
    }

    #[inline]
    pub fn norm1(&self) -> S {
        self.norm1
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self.shape, TestShape::Constant)
    }

    /// Evaluate on the unit sphere.
    pub fn eval_unit(&self, xi: &[S]) -> S {
        match self.shape {
            TestShape::Constant => S::one(),
            TestShape::Coordinate(i) => xi[i],
            TestShape::CoordinateSq(i) => xi[i] * xi[i],
        }
    }

    /// Gradient with respect to the sphere-point components.
    pub fn grad_unit(&self, xi: &[S]) -> Vec<S> {
        let mut g = vec![S::zero(); self.ambient];
        match self.shape {
            TestShape::Constant => {}
            TestShape::Coordinate(i) => g[i] = S::one(),
            TestShape::CoordinateSq(i) => g[i] = S::two() * xi[i],
        }
        g
    }

    /// Evaluate at an ambient point via the homogeneous extension.
    /// Points within `1e-9` of the origin are rejected.
    pub fn eval(&self, x: &[S]) -> Result<S> {
        let r = norm(x);
        if r < S::lit(1e-9) {
            return Err(Error::OutOfDomain(
                "test function undefined within 1e-9 of the origin".into(),
            ));
        }
        let xi: Vec<S> = x.iter().map(|&v| v / r).collect();
        Ok(self.eval_unit(&xi))
    }

    /// Check degree-zero homogeneity and the ambient gradient bound
    /// `|grad phi(X)|^2 <= |X|^{-2} |phi|_1^2` by sampling directions.
    pub fn validate(&self) -> Result<()> {
        let d = self.ambient;
        let mut worst = S::zero();
        for probe in 0..64 {
            // deterministic direction sweep
            let mut xi = vec![S::zero(); d];
            let mut seed = (probe as u64).wrapping_mul(0x9E3779B97F4A7C15);
            let mut len = S::zero();
            for item in xi.iter_mut() {
                seed = seed
                    .wrapping_add(0x9E3779B97F4A7C15)
                    .wrapping_mul(0xBF58476D1CE4E5B9);
                let u = ((seed >> 11) as f64) / (1u64 << 53) as f64 - 0.5;
                *item = S::lit(u);
                len += *item * *item;
            }
            let len = len.sqrt().max(S::lit(1e-6));
            for item in xi.iter_mut() {
                *item /= len;
            }
            // homogeneity: the extension only sees the direction
            for lambda in [S::half(), S::two(), S::lit(7.5)] {
                let scaled: Vec<S> = xi.iter().map(|&v| v * lambda).collect();
                let a = self.eval(&scaled)?;
                let b = self.eval_unit(&xi);
                worst = worst.max((a - b).abs());
            }
            // ambient gradient bound at |X| = lambda via the chain rule:
            // grad phi(X) = (I - xi xi^T) grad_xi phi / |X|
            let g = self.grad_unit(&xi);
            let mut dot_gx = S::zero();
            for (gi, xii) in g.iter().zip(&xi) {
                dot_gx += *gi * *xii;
            }
            let mut amb_sq = S::zero();
            for (gi, xii) in g.iter().zip(&xi) {
                let v = *gi - dot_gx * *xii;
                amb_sq += v * v;
            }
            if amb_sq > self.norm1 * self.norm1 * (S::one() + S::lit(1e-12)) {
                return Err(Error::Precondition {
                    what: format!("gradient bound violated for `{}`", self.id),
                    measured: amb_sq.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        if worst > S::lit(1e-12) {
            return Err(Error::Precondition {
                what: format!("homogeneity violated for `{}`", self.id),
                measured: worst.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_set_has_expected_ids() {
        let set = HomogeneousTestFunction::<f64>::bundled(3);
        let ids: Vec<&str> = set.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids, ["const", "xi1", "xi2", "xi3", "xi1sq", "xi2sq", "xi3sq"]);
    }

    #[test]
    fn validation_passes_for_bundled() {
        for f in HomogeneousTestFunction::<f64>::bundled(4) {
            f.validate().unwrap();
        }
    }

    #[test]
    fn origin_is_rejected() {
        let f = HomogeneousTestFunction::<f64>::constant(2);
        assert!(f.eval(&[1e-12, 0.0]).is_err());
    }

    #[test]
    fn homogeneous_extension() {
        let f = HomogeneousTestFunction::<f64>::coordinate_sq(3, 0).unwrap();
        let a = f.eval(&[3.0, 4.0, 0.0]).unwrap();
        assert!((a - 0.36).abs() < 1e-15); // (3/5)^2
    }
}
