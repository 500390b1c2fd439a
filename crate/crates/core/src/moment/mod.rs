//! Monotone mass functions, their Gaussian transforms, the
//! constancy-implies-homogeneity test and the high-moment separation
//! integrals.
//!
//! The central fact being exercised: if
//! `(4 pi t)^{-n/2} int_0^inf e^{-r^2/4t} dV(r)` is `t`-independent for a
//! monotone `V` with `V(0) = 0` and `V(r) <= c3 r^n`, then `V(r) = kappa r^n`.
//! The forward direction shows up as a constant transform; the converse is
//! probed by weighted moments that isolate localized bumps.

pub mod io;
pub mod laplace;

pub use laplace::{laplace_asymptotic_i, laplace_sandwich, LaplaceValue};

use crate::error::{Error, Result};
use crate::numerics::{CompensatedSum, GaussLegendre};
use crate::scalar::Real;

/// Analytic or tabulated monotone mass profile.
#[derive(Debug, Clone)]
pub enum MassProfile<S: Real> {
    /// Breakpoint table, interpolated linearly; repeated abscissae encode
    /// jumps (point masses). Extended beyond the last breakpoint with the
    /// final slope.
    PiecewiseLinear { points: Vec<(S, S)> },
    /// `V(r) = kappa r^n` exactly.
    Power { kappa: S },
    /// `V(r) = kappa r^n + sign * height * smoothstep((r - c + w/2) / w)`:
    /// a monotone profile with a localized shelf above or below the power
    /// law near `center`.
    PowerStep {
        kappa: S,
        height: S,
        center: S,
        width: S,
        above: bool,
    },
    /// `V(r) = r^2 + min(r, 1) * r` (the bundled non-homogeneous fixture
    /// for `n = 2`).
    QuadraticKink,
}

/// Monotone nondecreasing mass function `V` with `V(0) = 0` and growth
/// bound `V(r) <= c3 r^n`.
#[derive(Debug, Clone)]
pub struct MomentFunction<S: Real> {
    profile: MassProfile<S>,
    n: usize,
    c3: S,
}

impl<S: Real> MomentFunction<S> {
    pub fn new(profile: MassProfile<S>, n: usize, c3: S) -> Result<Self> {
        let f = Self { profile, n, c3 };
        f.validate()?;
        Ok(f)
    }

    /// `V(r) = r^n`.
    pub fn power(n: usize) -> Self {
        Self {
            profile: MassProfile::Power { kappa: S::one() },
            n,
            c3: S::one() + S::lit(1e-9),
        }
    }

    /// `V(r) = kappa r^n`.
    pub fn scaled_power(n: usize, kappa: S) -> Self {
        Self {
            profile: MassProfile::Power { kappa },
            n,
            c3: kappa * (S::one() + S::lit(1e-9)),
        }
    }

    /// Power law with a smooth monotone shelf of `height` near `center`,
    /// above (`above = true`) or below the power law.
    pub fn power_with_bump(
        n: usize,
        kappa: S,
        height: S,
        center: S,
        width: S,
        above: bool,
    ) -> Result<Self> {
        let c3 = kappa * S::two() + height;
        Self::new(
            MassProfile::PowerStep {
                kappa,
                height,
                center,
                width,
                above,
            },
            n,
            c3,
        )
    }

    pub fn quadratic_kink() -> Self {
        Self {
            profile: MassProfile::QuadraticKink,
            n: 2,
            c3: S::two() * (S::one() + S::lit(1e-9)),
        }
    }

    pub fn piecewise_linear(points: Vec<(S, S)>, n: usize, c3: S) -> Result<Self> {
        Self::new(MassProfile::PiecewiseLinear { points }, n, c3)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn growth_constant(&self) -> S {
        self.c3
    }

    #[inline]
    pub fn profile(&self) -> &MassProfile<S> {
        &self.profile
    }

    /// Evaluate `V(r)`.
    pub fn value(&self, r: S) -> S {
        if r <= S::zero() {
            return S::zero();
        }
        match &self.profile {
            MassProfile::Power { kappa } => *kappa * r.powi(self.n as i32),
            MassProfile::PowerStep {
                kappa,
                height,
                center,
                width,
                above,
            } => {
                let base = *kappa * r.powi(self.n as i32);
                let x = (r - (*center - *width * S::half())) / *width;
                let s = smoothstep(x);
                if *above {
                    base + *height * s
                } else {
                    base - *height * s
                }
            }
            MassProfile::QuadraticKink => r * r + r.min(S::one()) * r,
            MassProfile::PiecewiseLinear { points } => {
                if points.is_empty() {
                    return S::zero();
                }
                if r <= points[0].0 {
                    // segment from the implicit origin
                    if points[0].0 <= S::zero() {
                        return points[0].1;
                    }
                    return points[0].1 * r / points[0].0;
                }
                for w in points.windows(2) {
                    let (r0, v0) = w[0];
                    let (r1, v1) = w[1];
                    if r <= r1 {
                        if r1 == r0 {
                            return v1;
                        }
                        return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
                    }
                }
                // extend with the final slope
                let k = points.len();
                let (r1, v1) = points[k - 1];
                let slope = if k >= 2 {
                    let (r0, v0) = points[k - 2];
                    if r1 > r0 {
                        (v1 - v0) / (r1 - r0)
                    } else {
                        S::zero()
                    }
                } else {
                    S::zero()
                };
                v1 + slope * (r - r1)
            }
        }
    }

    /// Knot radii where the profile is not smooth, for panel alignment.
    fn knots(&self) -> Vec<S> {
        match &self.profile {
            MassProfile::PiecewiseLinear { points } => points.iter().map(|p| p.0).collect(),
            MassProfile::PowerStep { center, width, .. } => {
                vec![*center - *width * S::half(), *center + *width * S::half()]
            }
            MassProfile::QuadraticKink => vec![S::one()],
            MassProfile::Power { .. } => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        // Monotonicity, V(0) = 0 and the growth bound, on breakpoints when
        // tabulated and on a dense sample otherwise.
        let radii: Vec<S> = match &self.profile {
            MassProfile::PiecewiseLinear { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidSurface("empty breakpoint table".into()));
                }
                let mut prev_r = S::zero();
                let mut prev_v = S::zero();
                for &(r, v) in points {
                    if r < prev_r {
                        return Err(Error::InvalidSurface(
                            "breakpoints must be nondecreasing in r".into(),
                        ));
                    }
                    if v < prev_v - S::lit(1e-14) {
                        return Err(Error::InvalidSurface(
                            "mass function must be nondecreasing".into(),
                        ));
                    }
                    prev_r = r;
                    prev_v = v;
                }
                points.iter().map(|p| p.0).collect()
            }
            _ => {
                let mut rs = Vec::with_capacity(400);
                let mut r = S::lit(1e-3);
                while r < S::lit(200.0) {
                    rs.push(r);
                    r *= S::lit(1.05);
                }
                rs
            }
        };
        let mut prev = S::zero();
        for &r in &radii {
            let v = self.value(r);
            if v < prev - S::lit(1e-12) * (S::one() + prev.abs()) {
                return Err(Error::InvalidSurface(format!(
                    "mass function decreases near r = {r}"
                )));
            }
            if v > self.c3 * r.powi(self.n as i32) * (S::one() + S::lit(1e-9)) {
                return Err(Error::InvalidSurface(format!(
                    "growth bound violated at r = {r}: V = {v} > c3 r^n"
                )));
            }
            prev = v;
        }
        if self.value(S::zero()) != S::zero() {
            return Err(Error::InvalidSurface("V(0) must be 0".into()));
        }
        Ok(())
    }
}

fn smoothstep<S: Real>(x: S) -> S {
    let x = x.max(S::zero()).min(S::one());
    x * x * (S::lit(3.0) - S::two() * x)
}

/// `(4 pi t)^{-n/2} int_0^inf e^{-r^2/4t} dV(r)`, via integration by parts
/// and panel quadrature aligned to the profile knots.
pub fn gaussian_transform<S: Real>(v: &MomentFunction<S>, t: S, tol: S) -> Result<S> {
    if !(t > S::zero()) {
        return Err(Error::Precondition {
            what: "transform needs t > 0".into(),
            measured: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = v.degree();
    // Tail cap: the integrand after parts is V(r) (r/2t) e^{-r^2/4t}
    // <= c3 r^{n+1}/(2t) e^{-r^2/4t}.
    let log_inv_tol = -(tol.min(S::lit(1e-8))).ln();
    let r_cap = (t * (S::of_usize(n + 2) + S::two() * log_inv_tol)).sqrt() * S::two();
    let norm = (S::four() * S::PI() * t).powf(-S::of_usize(n) * S::half());
    let rule = GaussLegendre::new(32);
    let mut knots: Vec<S> = v
        .knots()
        .into_iter()
        .filter(|&k| k > S::zero() && k < r_cap)
        .collect();
    knots.push(S::zero());
    knots.push(r_cap);
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    knots.dedup_by(|a, b| (*a - *b).abs() <= S::lit(1e-14));
    let mut prev: Option<S> = None;
    let mut result = S::zero();
    for level in 0..=6u32 {
        let mut acc = CompensatedSum::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let span = b - a;
            if span <= S::zero() {
                continue;
            }
            let scale = t.sqrt().min(span);
            let base = (span / scale).ceil().to_usize().unwrap_or(4).clamp(1, 64);
            let count = (base << level).min(4096);
            let step = span / S::of_usize(count);
            for i in 0..count {
                let pa = a + step * S::of_usize(i);
                let pb = if i + 1 == count { b } else { pa + step };
                acc.add(rule.integrate(pa, pb, |r| {
                    v.value(r) * r / (S::two() * t) * (-r * r / (S::four() * t)).exp()
                }));
            }
        }
        result = acc.value() * norm;
        if let Some(p) = prev {
            if (result - p).abs() <= tol * result.abs().max(S::min_positive_value()) {
                return Ok(result);
            }
        }
        prev = Some(result);
    }
    Ok(result)
}

/// Closed form of the transform of `r^n`: `Gamma(n/2 + 1) / pi^{n/2}`.
pub fn power_transform_constant<S: Real>(n: usize) -> S {
    gamma_half_integer::<S>(n + 2) / S::PI().powf(S::of_usize(n) * S::half())
}

/// `Gamma(k / 2)` for integer `k >= 1`.
fn gamma_half_integer<S: Real>(k: usize) -> S {
    // Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(x+1) = x Gamma(x).
    let mut value = if k % 2 == 1 { S::PI().sqrt() } else { S::one() };
    let mut x = if k % 2 == 1 { S::half() } else { S::one() };
    while (x + S::half()) * S::two() <= S::of_usize(k) {
        value *= x;
        x += S::one();
    }
    value
}

/// Verdict of the constancy test.
#[derive(Debug, Clone)]
pub struct ConstancyReport<S: Real> {
    pub homogeneous: bool,
    /// Fitted coefficient with `V ~ kappa1 r^n` when homogeneous.
    pub kappa1: S,
    /// Relative spread of the transform over the grid.
    pub spread: S,
    pub values: Vec<(S, S)>,
}

/// Probe the transform on a `t`-grid spanning at least two decades.
pub fn constancy_test<S: Real>(
    v: &MomentFunction<S>,
    t_grid: &[S],
    tol: S,
) -> Result<ConstancyReport<S>> {
    if t_grid.len() < 3 {
        return Err(Error::Precondition {
            what: "constancy test needs at least 3 grid points".into(),
            measured: t_grid.len() as f64,
        });
    }
    let lo = t_grid.iter().cloned().fold(S::infinity(), S::min);
    let hi = t_grid.iter().cloned().fold(S::zero(), S::max);
    if hi / lo < S::lit(100.0) * (S::one() - S::lit(1e-9)) {
        return Err(Error::Precondition {
            what: "t grid must span at least two decades".into(),
            measured: (hi / lo).to_f64().unwrap_or(f64::NAN),
        });
    }
    let q_tol = (tol * S::lit(1e-2)).min(S::lit(1e-10));
    let mut values = Vec::with_capacity(t_grid.len());
    let mut v_lo = S::infinity();
    let mut v_hi = S::neg_infinity();
    let mut mean = S::zero();
    for &t in t_grid {
        let tr = gaussian_transform(v, t, q_tol)?;
        v_lo = v_lo.min(tr);
        v_hi = v_hi.max(tr);
        mean += tr;
        values.push((t, tr));
    }
    mean /= S::of_usize(values.len());
    let spread = (v_hi - v_lo) / mean.abs().max(S::min_positive_value());
    let homogeneous = spread < tol;
    let kappa1 = mean / power_transform_constant::<S>(v.degree());
    Ok(ConstancyReport {
        homogeneous,
        kappa1,
        spread,
        values,
    })
}

/// Default 25-point logarithmic grid over `[1e-2, 1e2]`.
pub fn default_t_grid<S: Real>() -> Vec<S> {
    let count = 25usize;
    (0..count)
        .map(|i| {
            let frac = S::of_usize(i) / S::of_usize(count - 1);
            S::lit(1e-2) * S::lit(1e4).powf(frac)
        })
        .collect()
}

/// `int_0^inf (V(r) - kappa1 r^n) r^{2k+1} e^{-r^2/t} dr` for each `k`,
/// evaluated in log space around the integrand's peak.
pub fn moment_separation<S: Real>(
    v: &MomentFunction<S>,
    kappa1: S,
    k_list: &[usize],
    t: S,
) -> Result<Vec<S>> {
    if !(t > S::zero()) {
        return Err(Error::Precondition {
            what: "moment separation needs t > 0".into(),
            measured: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = v.degree();
    let rule = GaussLegendre::new(32);
    let mut out = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let p = S::of_usize(2 * k + 1);
        // peak of r^p e^{-r^2/t} at r* = sqrt(p t / 2)
        let r_star = (p * t * S::half()).sqrt();
        let e_star = p * r_star.ln() - r_star * r_star / t;
        if e_star > S::lit(690.0) {
            return Err(Error::Overflow(format!(
                "moment with k = {k} exceeds the representable range (log magnitude {e_star:.1})"
            )));
        }
        // curvature of the log integrand sets the window width
        let sigma = r_star / (S::two() * p).sqrt();
        let lo = (r_star - S::lit(14.0) * sigma).max(S::lit(1e-12));
        let hi = r_star + S::lit(14.0) * sigma;
        let mut knots: Vec<S> = v
            .knots()
            .into_iter()
            .filter(|&r| r > lo && r < hi)
            .collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut acc = CompensatedSum::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let count = ((b - a) / (sigma / S::four()))
                .ceil()
                .to_usize()
                .unwrap_or(4)
                .clamp(2, 2048);
            let step = (b - a) / S::of_usize(count);
            for i in 0..count {
                let pa = a + step * S::of_usize(i);
                let pb = if i + 1 == count { b } else { pa + step };
                acc.add(rule.integrate(pa, pb, |r| {
                    let d = v.value(r) - kappa1 * r.powi(n as i32);
                    if d == S::zero() {
                        return S::zero();
                    }
                    let log_weight = p * r.ln() - r * r / t - e_star;
                    d * log_weight.exp()
                }));
            }
        }
        out.push(acc.value() * e_star.exp());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_transform_matches_closed_form() {
        for n in [1usize, 2, 3] {
            let v = MomentFunction::<f64>::power(n);
            for t in [0.01, 1.0, 100.0] {
                let tr = gaussian_transform(&v, t, 1e-10).unwrap();
                assert_relative_eq!(tr, power_transform_constant::<f64>(n), epsilon = 1e-9);
            }
        }
        assert_relative_eq!(power_transform_constant::<f64>(1), 0.5, epsilon = 1e-15);
        assert_relative_eq!(
            power_transform_constant::<f64>(2),
            std::f64::consts::FRAC_1_PI,
            epsilon = 1e-15
        );
    }

    #[test]
    fn transform_is_linear() {
        let v1 = MomentFunction::<f64>::power(2);
        let v2 = MomentFunction::<f64>::quadratic_kink();
        let t = 0.7;
        let a = 2.0;
        let combined = MomentFunction::new(
            MassProfile::PiecewiseLinear {
                points: (0..400)
                    .map(|i| {
                        let r = i as f64 * 0.05;
                        (r, a * v1.value(r) + v2.value(r))
                    })
                    .collect(),
            },
            2,
            3.0 * a + 3.0,
        )
        .unwrap();
        let t1 = gaussian_transform(&v1, t, 1e-10).unwrap();
        let t2 = gaussian_transform(&v2, t, 1e-10).unwrap();
        let tc = gaussian_transform(&combined, t, 1e-10).unwrap();
        // piecewise-linear resampling of the smooth parts costs ~h^2
        assert_relative_eq!(tc, a * t1 + t2, epsilon = 2e-4);
    }

    #[test]
    fn atom_contributes_its_gaussian_weight() {
        // V = unit jump at r = 1: transform (integration by parts route)
        // equals e^{-1/4t} (4 pi t)^{-n/2}.
        let v = MomentFunction::piecewise_linear(
            vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (50.0, 1.0)],
            1,
            2.0,
        )
        .unwrap();
        let t = 0.8f64;
        let tr = gaussian_transform(&v, t, 1e-11).unwrap();
        let expect = (-1.0 / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt();
        assert_relative_eq!(tr, expect, epsilon = 1e-9);
    }

    #[test]
    fn constancy_detects_homogeneous_and_not() {
        let grid = default_t_grid::<f64>();
        let hom = MomentFunction::<f64>::scaled_power(2, 3.0);
        let rep = constancy_test(&hom, &grid, 1e-6).unwrap();
        assert!(rep.homogeneous);
        assert_relative_eq!(rep.kappa1, 3.0, epsilon = 1e-7);

        let kink = MomentFunction::<f64>::quadratic_kink();
        let rep = constancy_test(&kink, &grid, 1e-6).unwrap();
        assert!(!rep.homogeneous);
        assert!(rep.spread > 1e-3);
    }

    #[test]
    fn separation_sign_tracks_bump_side() {
        let above =
            MomentFunction::<f64>::power_with_bump(2, 1.0, 0.1, 2.0, 0.5, true).unwrap();
        let below =
            MomentFunction::<f64>::power_with_bump(2, 1.0, 0.1, 2.0, 0.5, false).unwrap();
        let k = 200usize;
        let t = 2.0 * 4.0 / (2.0 * k as f64 + 1.0);
        let va = moment_separation(&above, 1.0, &[k], t).unwrap()[0];
        let vb = moment_separation(&below, 1.0, &[k], t).unwrap()[0];
        assert!(va > 0.0, "bump above gives positive moment, got {va:e}");
        assert!(vb < 0.0, "bump below gives negative moment, got {vb:e}");
        let exact = MomentFunction::<f64>::power(2);
        let v0 = moment_separation(&exact, 1.0, &[k], t).unwrap()[0];
        assert_eq!(v0, 0.0);
    }
}
