//! The Gaussian-weighted area functional `F_t`, its closed-form derivative,
//! the boundary-corrected derivative `G_t`, and the test-function functional
//! `Xi_t`.
//!
//! With `Phi_t(X) = (4 pi t)^{-n/2} e^{-|X|^2/4t}`:
//!
//! * `F_t(M)  = int_M Phi_t dmu`
//! * `F'_t(M) = -(1/2t) int_{dM} <X^T, nu> Phi_t
//!              - (1/4t)(1 - 1/t) int_M |X^N|^2 Phi_t dmu`  (shrinkers only)
//! * `G_t(M)  = -(1/4t)(1 - 1/t) int_M |X^N|^2 Phi_t dmu`
//! * `Xi_t(M, phi) = int_M phi(X/|X|) Phi_t dmu`

use crate::error::{Error, Result};
use crate::geom::{QuadratureSpec, Region, ShrinkerSurface, Weighting};
use crate::scalar::{dot, Real};
use crate::testfn::HomogeneousTestFunction;

/// A functional value with its quadrature error estimate.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalValue<S: Real> {
    pub value: S,
    pub est_error: S,
    /// Count of quadrature samples rejected for sitting within `1e-9` of the
    /// origin (only `Xi` can reject samples).
    pub rejected_samples: usize,
}

#[inline]
fn phi_norm<S: Real>(n: usize, t: S) -> S {
    (S::four() * S::PI() * t).powf(-S::of_usize(n) * S::half())
}

/// Gaussian area `F_t(M)`.
pub fn eval_f<S: Real>(
    surface: &ShrinkerSurface<S>,
    t: S,
    quad: &QuadratureSpec<S>,
) -> Result<FunctionalValue<S>> {
    require_positive_time(t)?;
    let n = surface.dimension();
    let raw = surface.integrate(Weighting::Gaussian(t), &Region::Full, quad, |_| S::one())?;
    let c = phi_norm(n, t);
    Ok(FunctionalValue {
        value: c * raw.value,
        est_error: c * raw.abs_err,
        rejected_samples: 0,
    })
}

/// Closed-form `F'_t(M)` for shrinkers: boundary term plus normal term.
pub fn eval_f_prime<S: Real>(
    surface: &ShrinkerSurface<S>,
    t: S,
    quad: &QuadratureSpec<S>,
    shrinker_tol: S,
) -> Result<FunctionalValue<S>> {
    require_positive_time(t)?;
    surface.require_shrinker(quad, shrinker_tol)?;
    let (boundary, normal) = f_prime_terms(surface, t, quad)?;
    Ok(FunctionalValue {
        value: boundary.value + normal.value,
        est_error: boundary.est_error + normal.est_error,
        rejected_samples: 0,
    })
}

/// The two terms of `F'_t`: `(-(1/2t) int_{dM} <X^T, nu> Phi_t,
/// -(1/4t)(1-1/t) int_M |X^N|^2 Phi_t)`.
pub fn f_prime_terms<S: Real>(
    surface: &ShrinkerSurface<S>,
    t: S,
    quad: &QuadratureSpec<S>,
) -> Result<(FunctionalValue<S>, FunctionalValue<S>)> {
    let n = surface.dimension();
    let c = phi_norm(n, t);
    let bdry = surface.boundary_integrate(Weighting::Gaussian(t), quad, |s, nu| {
        dot(&s.xt, nu)
    })?;
    let b_coef = -c / (S::two() * t);
    let g = eval_g_raw(surface, t, quad)?;
    Ok((
        FunctionalValue {
            value: b_coef * bdry.value,
            est_error: b_coef.abs() * bdry.abs_err,
            rejected_samples: 0,
        },
        g,
    ))
}

/// `G_t(M) = -(1/4t)(1 - 1/t) int_M |X^N|^2 Phi_t dmu`.
///
/// Sign contract: `G_t <= 0` for `t >= 1` and `G_t >= 0` for `t <= 1` on any
/// surface, since the integral factor is nonnegative.
pub fn eval_g<S: Real>(
    surface: &ShrinkerSurface<S>,
    t: S,
    quad: &QuadratureSpec<S>,
) -> Result<FunctionalValue<S>> {
    require_positive_time(t)?;
    eval_g_raw(surface, t, quad)
}

fn eval_g_raw<S: Real>(
    surface: &ShrinkerSurface<S>,
    t: S,
    quad: &QuadratureSpec<S>,
) -> Result<FunctionalValue<S>> {
    let n = surface.dimension();
    let c = phi_norm(n, t);
    let raw = surface.integrate(Weighting::Gaussian(t), &Region::Full, quad, |s| {
        s.xn_norm_sq()
    })?;
    let coef = -(S::one() - S::one() / t) / (S::four() * t) * c;
    Ok(FunctionalValue {
        value: coef * raw.value,
        est_error: coef.abs() * raw.abs_err,
        rejected_samples: 0,
    })
}

/// `Xi_t(M, phi)`; with the constant test function this equals `eval_f`.
pub fn eval_xi<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    t: S,
    quad: &QuadratureSpec<S>,
) -> Result<FunctionalValue<S>> {
    require_positive_time(t)?;
    if phi.ambient_dim() != surface.ambient_dim() {
        return Err(Error::OutOfDomain(format!(
            "test function lives in R^{}, surface in R^{}",
            phi.ambient_dim(),
            surface.ambient_dim()
        )));
    }
    let n = surface.dimension();
    let c = phi_norm(n, t);
    let rejected = std::sync::atomic::AtomicUsize::new(0);
    let cutoff = S::lit(1e-9);
    let raw = surface.integrate(Weighting::Gaussian(t), &Region::Full, quad, |s| {
        let r = s.radius();
        if r < cutoff {
            rejected.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            return S::zero();
        }
        let xi: Vec<S> = s.position.iter().map(|&v| v / r).collect();
        phi.eval_unit(&xi)
    })?;
    Ok(FunctionalValue {
        value: c * raw.value,
        est_error: c * raw.abs_err,
        rejected_samples: rejected.load(std::sync::atomic::Ordering::Relaxed),
    })
}

/// Centered finite difference of `F_t` in `t`.
pub fn f_derivative_fd<S: Real>(
    surface: &ShrinkerSurface<S>,
    t: S,
    dt: S,
    quad: &QuadratureSpec<S>,
) -> Result<S> {
    let hi = eval_f(surface, t + dt, quad)?.value;
    let lo = eval_f(surface, t - dt, quad)?.value;
    Ok((hi - lo) / (S::two() * dt))
}

/// Centered finite difference of `Xi_t` in `t`.
pub fn xi_derivative_fd<S: Real>(
    surface: &ShrinkerSurface<S>,
    phi: &HomogeneousTestFunction<S>,
    t: S,
    dt: S,
    quad: &QuadratureSpec<S>,
) -> Result<S> {
    let hi = eval_xi(surface, phi, t + dt, quad)?.value;
    let lo = eval_xi(surface, phi, t - dt, quad)?.value;
    Ok((hi - lo) / (S::two() * dt))
}

fn require_positive_time<S: Real>(t: S) -> Result<()> {
    if !(t > S::zero()) {
        return Err(Error::Precondition {
            what: "time must satisfy t > 0".into(),
            measured: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}
