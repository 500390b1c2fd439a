//! Compensated (Neumaier) summation.
//!
//! All quadrature reductions in this crate run in a fixed traversal order and
//! accumulate through this type, so results are bit-reproducible regardless
//! of how many scenarios run in parallel around them.

use crate::scalar::Real;

/// Neumaier variant of Kahan summation.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<S: Real> {
    sum: S,
    compensation: S,
}

impl<S: Real> CompensatedSum<S> {
    #[inline]
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            compensation: S::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: S) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> S {
        self.sum + self.compensation
    }
}

impl<S: Real> Default for CompensatedSum<S> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        let mut s = CompensatedSum::<f64>::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        let expected = 1e-16;
        assert!((s.value() - expected).abs() < 1e-30);
    }

    #[test]
    fn matches_plain_sum_on_benign_input() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let mut s = CompensatedSum::new();
        for &x in &xs {
            s.add(x);
        }
        let plain: f64 = xs.iter().sum();
        assert!((s.value() - plain).abs() < 1e-12);
    }
}
