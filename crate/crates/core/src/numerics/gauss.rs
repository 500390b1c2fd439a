//! Gauss–Legendre quadrature on an interval.

use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<S: Real> {
    pub nodes: Vec<S>,
    pub weights: Vec<S>,
}

impl<S: Real> GaussLegendre<S> {
    /// Build the rule by Newton iteration on the Legendre polynomial roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![S::zero(); n];
        let mut weights = vec![S::zero(); n];
        let nf = S::of_usize(n);
        for i in 0..(n + 1) / 2 {
            // Tricomi-style initial guess.
            let theta = S::PI() * (S::of_usize(i) + S::lit(0.75)) / (nf + S::half());
            let mut x = theta.cos();
            let mut dp = S::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x = x - dx;
                if dx.abs() <= S::epsilon() * (S::one() + x.abs()) {
                    break;
                }
            }
            let w = S::two() / ((S::one() - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(S) -> S>(&self, a: S, b: S, mut f: F) -> S {
        let mid = (a + b) * S::half();
        let half_len = (b - a) * S::half();
        let mut acc = S::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half_len * *x);
        }
        acc * half_len
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term
/// recurrence.
fn legendre_with_derivative<S: Real>(n: usize, x: S) -> (S, S) {
    let mut p0 = S::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, S::zero());
    }
    for k in 2..=n {
        let kf = S::of_usize(k);
        let p2 = ((S::two() * kf - S::one()) * x * p1 - (kf - S::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = S::of_usize(n) * (x * p1 - p0) / (x * x - S::one());
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::<f64>::new(8);
        // degree 15 is exact for an 8-point rule
        let val = rule.integrate(0.0, 1.0, |x| x.powi(15));
        assert_relative_eq!(val, 1.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1usize, 2, 5, 24, 48] {
            let rule = GaussLegendre::<f64>::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn gaussian_integral() {
        // int_0^6 e^{-x^2} dx = sqrt(pi)/2 to machine accuracy with panels
        let rule = GaussLegendre::<f64>::new(32);
        let mut acc = 0.0;
        for k in 0..6 {
            let a = k as f64;
            acc += rule.integrate(a, a + 1.0, |x| (-x * x).exp());
        }
        assert_relative_eq!(acc, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn f32_rule_is_usable() {
        let rule = GaussLegendre::<f32>::new(12);
        let val = rule.integrate(0.0f32, 1.0, |x| x * x);
        assert!((val - 1.0 / 3.0).abs() < 1e-6);
    }
}
