//! Laplace-method asymptotics of the concentrated moment integral
//!
//! `I(p) = p^{1/2} e^{p/2} r0^{-(p+1)} int_{r0-d}^{r0+d} r^p e^{-r^2/t_p} dr`
//!
//! with `t_p = 2 r0^2 / p`. After `r = r0 (1 + tau / sqrt(p))` the exponent
//! becomes `-tau^2 + p w(tau / sqrt(p))` with
//! `w(s) = log(1+s) - s + s^2/2`, so `I(p) -> sqrt(pi)` as `p -> infinity`
//! at rate `O(1/p)` once the window contains the Gaussian mass. All
//! exponents stay nonpositive, so nothing overflows regardless of `p`.

use crate::error::{Error, Result};
use crate::numerics::{CompensatedSum, GaussLegendre};
use crate::scalar::Real;

/// Result of a Laplace-asymptotic evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceValue<S: Real> {
    pub p: S,
    pub value: S,
    /// `|value / sqrt(pi) - 1|`.
    pub relative_gap: S,
}

/// Evaluate `I(p)` for `p >= 2`, `0 < delta < r0 / 2`.
pub fn laplace_asymptotic_i<S: Real>(p: S, r0: S, delta: S) -> Result<LaplaceValue<S>> {
    if !(p >= S::two()) || !p.is_finite() {
        return Err(Error::Precondition {
            what: "Laplace asymptotic needs p >= 2".into(),
            measured: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    if p > S::lit(1e15) {
        return Err(Error::Overflow(
            "p beyond the range where sqrt(p)-scaled differences stay representable".into(),
        ));
    }
    if !(delta > S::zero() && delta < r0 * S::half()) {
        return Err(Error::Precondition {
            what: "window must satisfy 0 < delta < r0 / 2".into(),
            measured: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let sqrt_p = p.sqrt();
    let t_max = (delta / r0 * sqrt_p).min(S::lit(40.0));
    let value = integrate_exponent(-t_max, t_max, |tau| exponent(p, tau));
    let sqrt_pi = S::PI().sqrt();
    Ok(LaplaceValue {
        p,
        value,
        relative_gap: (value / sqrt_pi - S::one()).abs(),
    })
}

/// The exact exponent `-tau^2 + p w(tau / sqrt(p))`, evaluated stably.
fn exponent<S: Real>(p: S, tau: S) -> S {
    let s = tau / p.sqrt();
    -tau * tau + p * w_series(s)
}

/// `w(s) = log(1+s) - s + s^2/2`, via the alternating series for small `s`.
fn w_series<S: Real>(s: S) -> S {
    if s.abs() < S::lit(1e-4) {
        // sum_{k>=3} (-1)^{k+1} s^k / k
        let mut term = s * s * s;
        let mut acc = term / S::lit(3.0);
        for k in 4..=14 {
            term = -term * s;
            acc += term / S::of_usize(k);
        }
        acc
    } else {
        s.ln_1p() - s + s * s * S::half()
    }
}

fn integrate_exponent<S: Real, F: Fn(S) -> S>(lo: S, hi: S, f: F) -> S {
    let rule = GaussLegendre::new(24);
    let mut acc = CompensatedSum::new();
    let span = hi - lo;
    let count = span.ceil().to_usize().unwrap_or(16).clamp(8, 256);
    let step = span / S::of_usize(count);
    for i in 0..count {
        let a = lo + step * S::of_usize(i);
        let b = if i + 1 == count { hi } else { a + step };
        acc.add(rule.integrate(a, b, |tau| f(tau).exp()));
    }
    acc.value()
}

/// The sandwich bounds from `min(0, 8 s^3 / 3) <= w(s) <= s^3 / 3`
/// (valid for `s >= -1/2`): at any finite `p` the exact `I(p)` lies between
/// these two integrals.
pub fn laplace_sandwich<S: Real>(p: S, r0: S, delta: S) -> Result<(S, S)> {
    if !(delta > S::zero() && delta < r0 * S::half()) {
        return Err(Error::Precondition {
            what: "window must satisfy 0 < delta < r0 / 2".into(),
            measured: delta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let sqrt_p = p.sqrt();
    let t_max = (delta / r0 * sqrt_p).min(S::lit(40.0));
    let lower = integrate_exponent(S::zero(), t_max, |tau| -tau * tau)
        + integrate_exponent(-t_max, S::zero(), |tau| {
            -tau * tau + S::lit(8.0) * tau * tau * tau / (S::lit(3.0) * sqrt_p)
        });
    let upper = integrate_exponent(-t_max, t_max, |tau| {
        -tau * tau + tau * tau * tau / (S::lit(3.0) * sqrt_p)
    });
    Ok((lower, upper))
}

/// Argmax of `r^p e^{-r^2 / t_p}` over `(0, infinity)` with
/// `t_p = 2 r0^2 / p`; closed form `r0`, provided for scan-style checks.
pub fn peak_location<S: Real>(p: S, r0: S) -> S {
    let t_p = S::two() * r0 * r0 / p;
    (p * t_p * S::half()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn approaches_sqrt_pi() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let v4 = laplace_asymptotic_i(1e4, 2.0, 0.5).unwrap();
        assert!(v4.relative_gap <= 0.02, "gap at 1e4: {}", v4.relative_gap);
        let v6 = laplace_asymptotic_i(1e6, 2.0, 0.5).unwrap();
        assert!(v6.relative_gap <= 0.002, "gap at 1e6: {}", v6.relative_gap);
        assert!((v6.value - sqrt_pi).abs() < (v4.value - sqrt_pi).abs());
    }

    #[test]
    fn sandwich_brackets_value() {
        for p in [1e2, 1e3, 1e4] {
            let v = laplace_asymptotic_i(p, 2.0, 0.5).unwrap().value;
            let (lo, hi) = laplace_sandwich(p, 2.0, 0.5).unwrap();
            assert!(lo <= v + 1e-12 && v <= hi + 1e-12, "p = {p}: {lo} {v} {hi}");
        }
    }

    #[test]
    fn peak_is_at_r0() {
        assert_relative_eq!(peak_location(1e4, 2.0), 2.0, epsilon = 1e-12);
        // direct scan of the integrand's log
        let p = 50.0f64;
        let r0 = 2.0;
        let t_p = 2.0 * r0 * r0 / p;
        let mut best = (0.0, f64::NEG_INFINITY);
        let mut r = 0.5f64;
        while r < 5.0 {
            let log_val = p * r.ln() - r * r / t_p;
            if log_val > best.1 {
                best = (r, log_val);
            }
            r += 1e-4;
        }
        assert!((best.0 - r0).abs() < 1e-3);
    }

    #[test]
    fn invalid_window_is_rejected() {
        assert!(laplace_asymptotic_i(1e4, 2.0, 1.5).is_err());
        assert!(laplace_asymptotic_i(1.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn f32_instantiation_is_close() {
        let v = laplace_asymptotic_i(1e4f32, 2.0, 0.5).unwrap();
        assert!((v.value / std::f32::consts::PI.sqrt() - 1.0).abs() < 0.05);
    }
}
