//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over a floating-point scalar so the
//! same kernels can run in `f32` (quick scans) and `f64` (the tolerances the
//! verification suite actually needs). Concrete aliases live at the crate
//! root.

use std::fmt;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar used by all geometry and quadrature code.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into the scalar type.
    ///
    /// Panics only if the literal is not representable, which cannot happen
    /// for the finite constants written in this crate.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    /// `n` as a scalar.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("small integer")
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    #[inline]
    fn four() -> Self {
        Self::lit(4.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Dot product of two ambient vectors.
#[inline]
pub fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

/// Euclidean norm.
#[inline]
pub fn norm<S: Real>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Squared Euclidean norm.
#[inline]
pub fn norm_sq<S: Real>(a: &[S]) -> S {
    dot(a, a)
}

/// `a - b` componentwise.
#[inline]
pub fn sub<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

/// `a + b` componentwise.
#[inline]
pub fn add<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// `c * a` componentwise.
#[inline]
pub fn scale<S: Real>(a: &[S], c: S) -> Vec<S> {
    a.iter().map(|x| *x * c).collect()
}

/// `acc += c * v`.
#[inline]
pub fn axpy<S: Real>(acc: &mut [S], c: S, v: &[S]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += c * *x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_roundtrip() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(f64::of_usize(7), 7.0);
    }

    #[test]
    fn vector_helpers() {
        let a = [1.0, 2.0, 2.0];
        assert_eq!(norm(&a), 3.0);
        let mut acc = [0.0, 0.0, 0.0];
        axpy(&mut acc, 2.0, &a);
        assert_eq!(acc, [2.0, 4.0, 4.0]);
    }
}
