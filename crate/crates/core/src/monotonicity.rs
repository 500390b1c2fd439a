//! Two-sided verification of the Gaussian-area monotonicity identity and of
//! the derivative bound for the test-function functional.
//!
//! The identity under test:
//!
//! `F_{t2}(M) - F_{t1}(M)
//!    = - int_{t1}^{t2} ( int_{dM} <X^T, nu> Phi_s / 2s ) ds
//!      + int_{t1}^{t2} (1/4s)(1 - 1/s) ( int_M |X^N|^2 Phi_s ) ds`
//!
//! holds on shrinkers; the ledger records both sides and the defect.
//!
//! The derivative bound: for `t > 1`, a surface avoiding the unit ball with
//! boundary on `∂B_R` and volume growth constant `c0` satisfies
//!
//! `|d/dt Xi_t(M, phi)| <= c1 (1 + log t) / (4 t (t-1)) |phi|_1
//!    + c_R t^{-(n/2+1)} |phi|_0 + (|phi|_0 + |phi|_1) |G_t|`
//!
//! with `c_R = (1/2) (4 pi)^{-n/2} R H^{n-1}(dM)` and `c1` obtained by
//! summing the dyadic series that bound `t^{-n/2} int_M t |X|^{-2} e^{-|X|^2/4t}`.

use crate::error::{Error, Result};
use crate::functionals::{eval_f, eval_g, f_prime_terms, xi_derivative_fd};
use crate::geom::{QuadratureSpec, ShrinkerSurface, Weighting};
use crate::numerics::adaptive_simpson;
use crate::scalar::{dot, Real};
use crate::testfn::HomogeneousTestFunction;

/// Ledger of the monotonicity identity between two times.
#[derive(Debug, Clone)]
pub struct MonotonicityLedger<S: Real> {
    pub t1: S,
    pub t2: S,
    pub f_t1: S,
    pub f_t2: S,
    /// `F_{t2} - F_{t1}`.
    pub lhs: S,
    /// `- int int_{dM} <X^T, nu> Phi_s / 2s ds`.
    pub boundary_term: S,
    /// `int (1/4s)(1 - 1/s) int_M |X^N|^2 Phi_s ds`.
    pub normal_term: S,
    /// `lhs - boundary_term - normal_term`.
    pub defect: S,
    /// Combined error budget (quadrature estimates plus the time-integral
    /// tolerances).
    pub error_budget: S,
}

/// Verify the monotonicity identity on `[t1, t2]`.
pub fn verify_monotonicity<S: Real>(
    surface: &ShrinkerSurface<S>,
    t1: S,
    t2: S,
    quad: &QuadratureSpec<S>,
    shrinker_tol: S,
) -> Result<MonotonicityLedger<S>> {
    if !(t1 > S::zero() && t2 >= t1) {
        return Err(Error::Precondition {
            what: "need 0 < t1 <= t2".into(),
            measured: t1.to_f64().unwrap_or(f64::NAN),
        });
    }
    surface.require_shrinker(quad, shrinker_tol)?;
    let f1 = eval_f(surface, t1, quad)?;
    if t1 == t2 {
        return Ok(MonotonicityLedger {
            t1,
            t2,
            f_t1: f1.value,
            f_t2: f1.value,
            lhs: S::zero(),
            boundary_term: S::zero(),
            normal_term: S::zero(),
            defect: S::zero(),
            error_budget: S::two() * f1.est_error,
        });
    }
    let f2 = eval_f(surface, t2, quad)?;
    let lhs = f2.value - f1.value;
    let scale = f1.value.abs().max(f2.value.abs()).max(S::one());
    let time_tol = quad.tol * scale;
    // Both time integrands reuse the closed-form derivative terms.
    let mut worst_term_err = S::zero();
    let boundary_term = adaptive_simpson(t1, t2, time_tol, |s| {
        match f_prime_terms(surface, s, quad) {
            Ok((b, _)) => {
                worst_term_err = worst_term_err.max(b.est_error);
                b.value
            }
            Err(_) => S::nan(),
        }
    });
    let mut worst_g_err = S::zero();
    let normal_term = adaptive_simpson(t1, t2, time_tol, |s| match eval_g(surface, s, quad) {
        Ok(g) => {
            worst_g_err = worst_g_err.max(g.est_error);
            g.value
        }
        Err(_) => S::nan(),
    });
    if !boundary_term.is_finite() || !normal_term.is_finite() {
        return Err(Error::NotConverged(
            "time integrand evaluation failed inside the monotonicity ledger".into(),
        ));
    }
    let defect = lhs - boundary_term - normal_term;
    let span = t2 - t1;
    let error_budget = f1.est_error
        + f2.est_error
        + S::two() * time_tol
        + span * (worst_term_err + worst_g_err);
    Ok(MonotonicityLedger {
        t1,
        t2,
        f_t1: f1.value,
        f_t2: f2.value,
        lhs,
        boundary_term,
        normal_term,
        defect,
        error_budget,
    })
}

/// The constant `c1 = c1(n, c0)` of the derivative bound, from the two
/// dyadic sums bounding `t^{-n/2} int_M (t/|X|^2) e^{-|X|^2/4t} dmu` for a
/// surface avoiding the unit ball.
pub fn c1_constant<S: Real>(n: usize, c0: S) -> Result<S> {
    if n < 2 {
        return Err(Error::Unsupported(
            "the dyadic derivative bound needs n >= 2".into(),
        ));
    }
    // First sum: sum_{k >= 0} 2^{k(n-2)+n} e^{-4^{k-1}}.
    let mut s_inf = S::zero();
    for k in 0..64 {
        let term = S::two().powi((k * (n as i32 - 2)) + n as i32)
            * (-S::four().powi(k - 1)).exp();
        s_inf += term;
        if term < S::lit(1e-300) {
            break;
        }
    }
    // Second sum up to K terms: sum_{k=1}^{K} 2^{-k(n-2)+n}.
    let second_sum = |kk: i32| -> S {
        let mut acc = S::zero();
        for k in 1..=kk {
            acc += S::two().powi(-(k * (n as i32 - 2)) + n as i32);
        }
        acc
    };
    let norm = (S::four() * S::PI()).powf(S::of_usize(n) * S::half());
    // The ratio (S_inf + Sigma_2(K(L))) / (1 + L) with L = log t jumps up at
    // L_j = 2 j log 2 and decays in between; its supremum over L >= 0 is
    // attained at L = 0 or just after a jump.
    let two_log2 = S::two() * S::two().ln();
    let mut c1 = c0 * (s_inf + second_sum(1)) / norm;
    for j in 1..=96 {
        let l = two_log2 * S::of_usize(j);
        let k = 1 + j as i32;
        let ratio = c0 * (s_inf + second_sum(k)) / (norm * (S::one() + l));
        c1 = c1.max(ratio);
    }
    Ok(c1)
}

/// Surface-dependent constants of the derivative bound, measured once and
/// reused across times and test functions.
#[derive(Debug, Clone, Copy)]
pub struct XiBoundConstants<S: Real> {
    /// Measured volume-growth constant.
    pub c0: S,
    /// Dyadic-sum constant `c1(n, c0)`.
    pub c1: S,
    /// Boundary constant `c_R = (1/2)(4 pi)^{-n/2} R H^{n-1}(dM)`.
    pub c_r: S,
}

impl<S: Real> XiBoundConstants<S> {
    /// Measure the constants for a surface avoiding the unit ball.
    pub fn measure(surface: &ShrinkerSurface<S>, quad: &QuadratureSpec<S>) -> Result<Self> {
        let n = surface.dimension();
        let inner = surface.inner_radius();
        if inner < S::one() - S::lit(1e-12) {
            return Err(Error::Precondition {
                what: "derivative bound needs the surface to avoid the unit ball".into(),
                measured: inner.to_f64().unwrap_or(f64::NAN),
            });
        }
        let c0 = surface.volume_growth_constant(quad)?;
        let c1 = c1_constant(n, c0)?;
        let c_r = match surface.boundary_radius() {
            None => S::zero(),
            Some(r) => {
                let measure = surface.boundary_measure(quad)?;
                S::half() * (S::four() * S::PI()).powf(-S::of_usize(n) * S::half()) * r * measure
            }
        };
        Ok(Self { c0, c1, c_r })
    }

    /// The bound value at time `t` for `phi`, given `|G_t|`.
    pub fn bound_at(&self, n: usize, t: S, phi: &HomogeneousTestFunction<S>, g_abs: S) -> S {
        self.c1 * (S::one() + t.ln()) / (S::four() * t * (t - S::one())) * phi.norm1()
            + self.c_r * t.powf(-(S::of_usize(n) * S::half() + S::one())) * phi.norm0()
            + (phi.norm0() + phi.norm1()) * g_abs
    }
}

/// Both sides of the derivative bound at one time.
#[derive(Debug, Clone)]
pub struct XiBoundReport<S: Real> {
    pub t: S,
    /// `|d/dt Xi_t|` by centered differences.
    pub numeric: S,
    /// The bound value.
    pub bound: S,
    pub c0: S,
    pub c1: S,
    pub c_r: S,
    pub g_abs: S,
    /// `bound - numeric`.
    pub margin: S,
}

/// Evaluate the derivative bound for `phi` at time `t >= 1 + delta`,
/// measuring the surface constants on the fly.
pub fn xi_derivative_bound<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    t: S,
    quad: &QuadratureSpec<S>,
    delta: S,
    shrinker_tol: S,
) -> Result<XiBoundReport<S>> {
    surface.require_shrinker(quad, shrinker_tol)?;
    let constants = XiBoundConstants::measure(surface, quad)?;
    xi_derivative_bound_with(surface, phi, t, quad, delta, &constants)
}

/// Evaluate the derivative bound with precomputed constants (the shrinker
/// precondition is the caller's responsibility on this path).
pub fn xi_derivative_bound_with<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    t: S,
    quad: &QuadratureSpec<S>,
    delta: S,
    constants: &XiBoundConstants<S>,
) -> Result<XiBoundReport<S>> {
    let n = surface.dimension();
    if t < S::one() + delta {
        return Err(Error::Precondition {
            what: format!("bound degenerates near t = 1; need t >= 1 + {delta}"),
            measured: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let g_abs = eval_g(surface, t, quad)?.value.abs();
    let bound = constants.c1 * (S::one() + t.ln()) / (S::four() * t * (t - S::one()))
        * phi.norm1()
        + constants.c_r * t.powf(-(S::of_usize(n) * S::half() + S::one())) * phi.norm0()
        + (phi.norm0() + phi.norm1()) * g_abs;
    let dt = t * S::lit(1e-4);
    let numeric = xi_derivative_fd(surface, phi, t, dt, quad)?.abs();
    Ok(XiBoundReport {
        t,
        numeric,
        bound,
        c0: constants.c0,
        c1: constants.c1,
        c_r: constants.c_r,
        g_abs,
        margin: bound - numeric,
    })
}

/// Integral of the bound over `[t_a, t_b]`, used to dominate spreads of
/// `Xi` along scale sequences.
pub fn integrated_bound<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    t_a: S,
    t_b: S,
    quad: &QuadratureSpec<S>,
) -> Result<S> {
    let n = surface.dimension();
    let constants = XiBoundConstants::measure(surface, quad)?;
    let coarse = QuadratureSpec {
        tol: (quad.tol * S::lit(100.0)).min(S::lit(1e-6)),
        ..quad.clone()
    };
    let value = adaptive_simpson(t_a, t_b, S::lit(1e-8), |s| {
        let g_abs = match eval_g(surface, s, &coarse) {
            Ok(g) => g.value.abs(),
            Err(_) => return S::nan(),
        };
        constants.c1 * (S::one() + s.ln()) / (S::four() * s * (s - S::one())) * phi.norm1()
            + constants.c_r * s.powf(-(S::of_usize(n) * S::half() + S::one())) * phi.norm0()
            + (phi.norm0() + phi.norm1()) * g_abs
    });
    if !value.is_finite() {
        return Err(Error::NotConverged("bound integrand failed".into()));
    }
    Ok(value)
}

/// CSV-friendly view of a ledger row.
impl<S: Real> MonotonicityLedger<S> {
    pub fn passes(&self, tolerance: S) -> bool {
        self.defect.abs() <= tolerance.max(self.error_budget)
    }
}

/// Convenience: `<X^T, nu>` sign probe for the outward-conormal convention,
/// returning the boundary average of `<X^T, nu>`.
pub fn boundary_xt_nu_average<S: Real>(
    surface: &ShrinkerSurface<S>,
    quad: &QuadratureSpec<S>,
) -> Result<S> {
    let total = surface.boundary_integrate(Weighting::Lebesgue, quad, |s, nu| dot(&s.xt, nu))?;
    let measure = surface.boundary_measure(quad)?;
    if measure <= S::zero() {
        return Err(Error::EmptySampleSet);
    }
    Ok(total.value / measure)
}
