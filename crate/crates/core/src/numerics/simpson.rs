//! Adaptive Simpson quadrature for the time integrals of the monotonicity
//! ledger, where each integrand evaluation is itself a surface integral.

use crate::scalar::Real;

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Depth-limited; on hitting the depth cap the current panel estimate is
/// accepted, which keeps the routine total and leaves the tolerance to the
/// caller's error budget.
pub fn adaptive_simpson<S: Real, F: FnMut(S) -> S>(a: S, b: S, tol: S, mut f: F) -> S {
    if a == b {
        return S::zero();
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * S::half();
    let fm = f(m);
    let whole = simpson_panel(a, b, fa, fm, fb);
    recurse(a, b, fa, fm, fb, whole, tol, 48, &mut f)
}

fn simpson_panel<S: Real>(a: S, b: S, fa: S, fm: S, fb: S) -> S {
    (b - a) / S::lit(6.0) * (fa + S::four() * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<S: Real, F: FnMut(S) -> S>(
    a: S,
    b: S,
    fa: S,
    fm: S,
    fb: S,
    whole: S,
    tol: S,
    depth: u32,
    f: &mut F,
) -> S {
    let m = (a + b) * S::half();
    let lm = (a + m) * S::half();
    let rm = (m + b) * S::half();
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= S::lit(15.0) * tol {
        return left + right + delta / S::lit(15.0);
    }
    let half_tol = tol * S::half();
    recurse(a, m, fa, flm, fm, left, half_tol, depth - 1, f)
        + recurse(m, b, fm, frm, fb, right, half_tol, depth - 1, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smooth_integrand() {
        let v = adaptive_simpson(0.0f64, std::f64::consts::PI, 1e-12, |x| x.sin());
        assert_relative_eq!(v, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn empty_interval() {
        let v = adaptive_simpson(1.0f64, 1.0, 1e-12, |_| 42.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn decaying_integrand() {
        // int_1^16 t^{-2} dt = 1 - 1/16
        let v = adaptive_simpson(1.0f64, 16.0, 1e-12, |t| t.powi(-2));
        assert_relative_eq!(v, 1.0 - 1.0 / 16.0, epsilon = 1e-10);
    }
}
