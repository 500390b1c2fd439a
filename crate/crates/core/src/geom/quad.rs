//! Deterministic quadrature over surfaces: Gaussian-weighted and Lebesgue
//! integrals restricted to balls, annuli and off-center balls, with nested
//! refinement levels and compensated reduction.

use crate::error::{Error, Result};
use crate::geom::sample::GeometrySample;
use crate::geom::surface::{
    complete_frame, cylinder_sample, embed, plane_sample, sphere_sample, CylinderData, PlaneData,
    ShrinkerSurface, SurfaceKind,
};
use crate::numerics::{CompensatedSum, GaussLegendre};
use crate::scalar::{axpy, dot, norm, norm_sq, Real};

/// Truncation and refinement controls for surface quadrature.
#[derive(Debug, Clone)]
pub struct QuadratureSpec<S: Real> {
    /// Relative tolerance for nested refinement.
    pub tol: S,
    /// Maximum refinement depth.
    pub max_depth: u32,
    /// Gaussian tail cutoff; `None` selects the default rule
    /// `2 sqrt(t (n + 2 ln(1/tol)))`.
    pub rho_max: Option<S>,
}

impl<S: Real> Default for QuadratureSpec<S> {
    fn default() -> Self {
        Self {
            tol: S::lit(1e-10),
            max_depth: 7,
            rho_max: None,
        }
    }
}

impl<S: Real> QuadratureSpec<S> {
    pub fn with_tol(tol: S) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    /// Truncation radius for Gaussian weight at time `t` on an `n`-surface.
    pub fn gaussian_cutoff(&self, t: S, n: usize) -> S {
        match self.rho_max {
            Some(r) => r,
            None => {
                let log_inv_tol = -self.tol.ln();
                (t * (S::of_usize(n) + S::two() * log_inv_tol)).sqrt() * S::two()
            }
        }
    }
}

/// Integration domain restriction.
#[derive(Debug, Clone)]
pub enum Region<S: Real> {
    Full,
    /// `M ∩ B_r`.
    Ball(S),
    /// `M ∩ (B_outer \ B_inner)`.
    Annulus(S, S),
    /// `M ∩ B_radius(center)`.
    BallAt { center: Vec<S>, radius: S },
}

/// Measure weighting.
#[derive(Debug, Clone, Copy)]
pub enum Weighting<S: Real> {
    /// Plain surface measure.
    Lebesgue,
    /// Surface measure times `e^{-|X|^2 / 4t}` (without the `(4 pi t)^{-n/2}`
    /// normalization).
    Gaussian(S),
}

/// A quadrature result with its nested-refinement error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral<S: Real> {
    pub value: S,
    pub abs_err: S,
    pub level: u32,
    /// Set when a bounded discrete surface cannot reach the Gaussian cutoff
    /// radius, i.e. the surface itself truncates the integral.
    pub truncated_domain: bool,
}

/// A compensated accumulator tracking the signed sum and the absolute
/// mass; the mass floors the relative convergence check so integrals with
/// heavy symmetric cancellation terminate.
struct PairSum<S: Real> {
    signed: CompensatedSum<S>,
    absolute: CompensatedSum<S>,
    unit: CompensatedSum<S>,
}

impl<S: Real> PairSum<S> {
    fn new() -> Self {
        Self {
            signed: CompensatedSum::new(),
            absolute: CompensatedSum::new(),
            unit: CompensatedSum::new(),
        }
    }

    /// Add one node: `term = base * f(sample)` with `base` the positive
    /// measure factor alone.
    #[inline]
    fn add(&mut self, term: S, base: S) {
        self.signed.add(term);
        self.absolute.add(term.abs());
        self.unit.add(base.abs());
    }

    #[inline]
    fn add_scaled(&mut self, other: &PairSum<S>, factor: S) {
        self.signed.add(other.signed.value() * factor);
        self.absolute.add(other.absolute.value() * factor.abs());
        self.unit.add(other.unit.value() * factor.abs());
    }

    #[inline]
    fn value(&self) -> S {
        self.signed.value()
    }

    #[inline]
    fn mass(&self) -> S {
        self.absolute.value()
    }

    /// Integral of 1 against the measure: the scale below which an
    /// integrand is numerically indistinguishable from zero.
    #[inline]
    fn unit_mass(&self) -> S {
        self.unit.value()
    }
}

impl<S: Real> ShrinkerSurface<S> {
    /// Integrate `f(sample)` against the chosen weighting over the region.
    ///
    /// Refinement doubles the node density until two consecutive levels
    /// agree to `quad.tol` relative; the last difference is reported as the
    /// error estimate.
    pub fn integrate<F: Fn(&GeometrySample<S>) -> S>(
        &self,
        weighting: Weighting<S>,
        region: &Region<S>,
        quad: &QuadratureSpec<S>,
        f: F,
    ) -> Result<Integral<S>> {
        if let (Weighting::Lebesgue, Region::Full, None) = (&weighting, region, self.outer_radius())
        {
            return Err(Error::Unsupported(
                "Lebesgue integral over an unbounded surface needs a bounded region".into(),
            ));
        }
        if let Weighting::Gaussian(t) = weighting {
            if !(t > S::zero()) {
                return Err(Error::Precondition {
                    what: "Gaussian weighting needs t > 0".into(),
                    measured: t.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let mut prev: Option<S> = None;
        let mut out = Integral {
            value: S::zero(),
            abs_err: S::infinity(),
            level: 0,
            truncated_domain: false,
        };
        for level in 0..=quad.max_depth {
            let mut sums = PairSum::new();
            self.accumulate(weighting, region, quad, level, &mut sums, &f)?;
            let value = sums.value();
            // Below eps * (integral of 1) the integrand is numerically zero.
            let zero_scale = S::epsilon() * sums.unit_mass();
            let floor = value
                .abs()
                .max(sums.mass())
                .max(zero_scale)
                .max(S::min_positive_value());
            if let Some(p) = prev {
                let err = (value - p).abs();
                out = Integral {
                    value,
                    abs_err: err,
                    level,
                    truncated_domain: out.truncated_domain,
                };
                if err <= quad.tol * floor || err == S::zero() {
                    break;
                }
            } else {
                out.value = value;
            }
            prev = Some(value);
            // Discrete node sets do not change with level; stop immediately.
            if self.is_discrete() {
                out = Integral {
                    value,
                    abs_err: S::zero(),
                    level,
                    truncated_domain: self.gaussian_domain_truncated(weighting, quad),
                };
                break;
            }
        }
        if let Weighting::Gaussian(t) = weighting {
            self.check_tail_bound(t, quad, &out)?;
        }
        Ok(out)
    }

    fn is_discrete(&self) -> bool {
        matches!(
            self.kind(),
            SurfaceKind::TriangleMesh(_) | SurfaceKind::PolylineCurve(_) | SurfaceKind::GraphPatch(_)
        )
    }

    fn gaussian_domain_truncated(&self, weighting: Weighting<S>, quad: &QuadratureSpec<S>) -> bool {
        match (weighting, self.outer_radius()) {
            (Weighting::Gaussian(t), Some(r_out)) => {
                matches!(self.kind(), SurfaceKind::GraphPatch(_))
                    && r_out < quad.gaussian_cutoff(t, self.dimension())
            }
            _ => false,
        }
    }

    /// Polynomial-volume-growth constant `c0` with
    /// `vol(M ∩ B_r) < c0 r^n` on a dyadic radius sweep.
    pub fn volume_growth_constant(&self, quad: &QuadratureSpec<S>) -> Result<S> {
        let n = self.dimension();
        match self.kind() {
            SurfaceKind::Plane(_) => Ok(unit_ball_volume::<S>(n)),
            SurfaceKind::RoundSphere(_) => Ok(sphere_area::<S>(n)),
            _ => {
                let lo = self.inner_radius().max(S::lit(1e-3));
                let hi = match self.outer_radius() {
                    Some(r) => r * S::two(),
                    None => lo * S::lit(4096.0),
                };
                let mut c0 = S::zero();
                let mut r = lo * S::lit(1.01);
                let coarse = QuadratureSpec {
                    tol: (quad.tol * S::lit(1e4)).min(S::lit(1e-6)),
                    ..quad.clone()
                };
                while r <= hi {
                    let area = self
                        .integrate(Weighting::Lebesgue, &Region::Ball(r), &coarse, |_| S::one())?
                        .value;
                    c0 = c0.max(area / r.powi(n as i32));
                    r *= S::lit(2.0).sqrt();
                }
                if c0 <= S::zero() {
                    return Err(Error::EmptySampleSet);
                }
                Ok(c0 * S::lit(1.0000001))
            }
        }
    }

    fn check_tail_bound(&self, t: S, quad: &QuadratureSpec<S>, out: &Integral<S>) -> Result<()> {
        if self.outer_radius().is_some() {
            return Ok(());
        }
        let n = self.dimension();
        let rho = quad.gaussian_cutoff(t, n);
        let c0 = match self.kind() {
            SurfaceKind::Plane(_) => unit_ball_volume::<S>(n),
            SurfaceKind::RoundCylinder(c) => {
                // area(M ∩ B_r) <= |S^k| rho_c^k * omega_{n-k} (2r)^{n-k} / r^n,
                // maximized numerically below 2 pi-ish scales; a crude closed
                // bound suffices for the tail check.
                sphere_area::<S>(c.sphere_dim) * c.radius.powi(c.sphere_dim as i32)
                    * S::two().powi((n - c.sphere_dim) as i32)
                    / c.radius.powi(n as i32 - c.sphere_dim as i32)
            }
            _ => S::lit(16.0),
        };
        let tail = c0 * rho.powi(n as i32) * (-rho * rho / (S::four() * t)).exp();
        // Integrals of identically small integrands would fail a purely
        // relative comparison, so floor the scale at the surface's own
        // Gaussian mass scale e^{-inner^2/4t} (4t)^{n/2}.
        let inner = self.inner_radius();
        let mass_scale = (S::four() * t).powf(S::of_usize(n) * S::half())
            * (-inner * inner / (S::four() * t)).exp();
        let floor = out.value.abs().max(mass_scale);
        if tail >= quad.tol * floor && tail > S::lit(1e-280) {
            return Err(Error::Truncation {
                rho_max: rho.to_f64().unwrap_or(f64::NAN),
                suggested: (rho * S::lit(1.5)).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    fn accumulate<F: Fn(&GeometrySample<S>) -> S>(
        &self,
        weighting: Weighting<S>,
        region: &Region<S>,
        quad: &QuadratureSpec<S>,
        level: u32,
        sums: &mut PairSum<S>,
        f: &F,
    ) -> Result<()> {
        match self.kind() {
            SurfaceKind::Plane(p) => {
                self.plane_accumulate(p, weighting, region, quad, level, sums, f)
            }
            SurfaceKind::RoundSphere(s) => {
                self.sphere_accumulate(s.radius, weighting, region, level, sums, f)
            }
            SurfaceKind::RoundCylinder(c) => {
                self.cylinder_accumulate(c, weighting, region, quad, level, sums, f)
            }
            SurfaceKind::GraphPatch(d) => {
                for s in d.samples.iter().flatten() {
                    push_discrete(s, weighting, region, sums, f);
                }
                Ok(())
            }
            SurfaceKind::TriangleMesh(d) => {
                for s in &d.samples {
                    push_discrete(s, weighting, region, sums, f);
                }
                Ok(())
            }
            SurfaceKind::PolylineCurve(d) => {
                for s in &d.samples {
                    push_discrete(s, weighting, region, sums, f);
                }
                Ok(())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn plane_accumulate<F: Fn(&GeometrySample<S>) -> S>(
        &self,
        p: &PlaneData<S>,
        weighting: Weighting<S>,
        region: &Region<S>,
        quad: &QuadratureSpec<S>,
        level: u32,
        sums: &mut PairSum<S>,
        f: &F,
    ) -> Result<()> {
        let n = self.dimension();
        let gauss_cap = match weighting {
            Weighting::Gaussian(t) => Some(quad.gaussian_cutoff(t, n)),
            Weighting::Lebesgue => None,
        };
        match region {
            Region::Full | Region::Ball(_) | Region::Annulus(_, _) => {
                let (mut lo, mut hi) = radial_window(region, gauss_cap)?;
                lo = lo.max(p.inner_radius);
                if let Some(cap) = gauss_cap {
                    hi = hi.min(cap);
                }
                if hi <= lo {
                    return Ok(());
                }
                let rule = GaussLegendre::new(16);
                let dirs = param_sphere_nodes::<S>(n, level)?;
                let panels = radial_panels(lo, hi, weighting, level);
                for (omega, w_ang) in &dirs {
                    let dir = plane_direction(p, omega);
                    for (a, b) in &panels {
                        let mut acc = PairSum::new();
                        for (node, w_r) in rule.nodes.iter().zip(&rule.weights) {
                            let r = (*a + *b) * S::half() + (*b - *a) * S::half() * *node;
                            let x: Vec<S> = dir.iter().map(|&d| d * r).collect();
                            let jac = r.powi(n as i32 - 1);
                            let sample = plane_sample(p, x, S::one());
                            let gw = gaussian_factor(weighting, sample.radius_sq());
                            let base = *w_r * jac * gw;
                            acc.add(base * f(&sample), base);
                        }
                        sums.add_scaled(&acc, (*b - *a) * S::half() * *w_ang);
                    }
                }
                Ok(())
            }
            Region::BallAt { center, radius } => {
                if center.len() != self.ambient_dim() {
                    return Err(Error::OutOfDomain("ball center dimension mismatch".into()));
                }
                // Project the center onto the plane; the intersection is a
                // disk in plane coordinates.
                let p_coord: Vec<S> = p.basis.iter().map(|e| dot(center, e)).collect();
                let in_plane_sq: S = norm_sq(&p_coord);
                let q_sq = norm_sq(center) - in_plane_sq;
                let disk_sq = *radius * *radius - q_sq;
                if disk_sq <= S::zero() {
                    return Ok(());
                }
                let disk_r = disk_sq.sqrt();
                let rule = GaussLegendre::new(16);
                let dirs = param_sphere_nodes::<S>(n, level)?;
                for (omega, w_ang) in &dirs {
                    // s-intervals along p_coord + s*omega within the disk,
                    // outside the excluded inner ball, inside the Gaussian cap.
                    let beta = dot(&p_coord, omega);
                    let base = norm_sq(&p_coord);
                    let mut intervals = vec![(S::zero(), disk_r)];
                    if p.inner_radius > S::zero() {
                        intervals =
                            exclude_ball(&intervals, base, beta, p.inner_radius * p.inner_radius);
                    }
                    if let Some(cap) = gauss_cap {
                        intervals = clip_to_ball(&intervals, base, beta, cap * cap);
                    }
                    for (a, b) in intervals {
                        if b <= a {
                            continue;
                        }
                        for (pa, pb) in radial_panels(a, b, weighting, level) {
                            let mut acc = PairSum::new();
                            for (node, w_r) in rule.nodes.iter().zip(&rule.weights) {
                                let s = (pa + pb) * S::half() + (pb - pa) * S::half() * *node;
                                let mut xi = p_coord.clone();
                                axpy(&mut xi, s, omega);
                                let mut x = vec![S::zero(); self.ambient_dim()];
                                for (e, c) in p.basis.iter().zip(&xi) {
                                    axpy(&mut x, *c, e);
                                }
                                let jac = s.powi(n as i32 - 1);
                                let sample = plane_sample(p, x, S::one());
                                let gw = gaussian_factor(weighting, sample.radius_sq());
                                let base = *w_r * jac * gw;
                                acc.add(base * f(&sample), base);
                            }
                            sums.add_scaled(&acc, (pb - pa) * S::half() * *w_ang);
                        }
                    }
                }
                Ok(())
            }
        }
    }

    fn sphere_accumulate<F: Fn(&GeometrySample<S>) -> S>(
        &self,
        radius: S,
        weighting: Weighting<S>,
        region: &Region<S>,
        level: u32,
        sums: &mut PairSum<S>,
        f: &F,
    ) -> Result<()> {
        let n = self.dimension();
        let ambient = self.ambient_dim();
        // The position radius is constant; ball/annulus regions are
        // all-or-nothing, caps need angular restriction.
        let mut cap: Option<(Vec<S>, S)> = None;
        match region {
            Region::Full => {}
            Region::Ball(r) => {
                if radius > *r {
                    return Ok(());
                }
            }
            Region::Annulus(a, b) => {
                if radius < *a || radius > *b {
                    return Ok(());
                }
            }
            Region::BallAt { center, radius: rc } => {
                if center.len() != ambient {
                    return Err(Error::OutOfDomain("ball center dimension mismatch".into()));
                }
                let c_sub: Vec<S> = center[..=n].to_vec();
                let c_norm = norm(&c_sub);
                let rhs = norm_sq(center) + radius * radius - *rc * *rc;
                if c_norm <= S::lit(1e-14) {
                    if rhs > S::zero() {
                        return Ok(()); // entire sphere outside the ball
                    }
                } else {
                    let cos_gamma = rhs / (S::two() * radius * c_norm);
                    if cos_gamma > S::one() {
                        return Ok(());
                    }
                    if cos_gamma > -S::one() {
                        let dir: Vec<S> = c_sub.iter().map(|&v| v / c_norm).collect();
                        cap = Some((dir, cos_gamma));
                    }
                }
            }
        }
        let jac = radius.powi(n as i32);
        let gw = gaussian_factor(weighting, radius * radius);
        match n {
            1 => {
                match cap {
                    None => {
                        let count = (64usize << level).min(8192);
                        let w = S::two() * S::PI() / S::of_usize(count);
                        for j in 0..count {
                            let theta = (S::of_usize(j) + S::half()) * w;
                            let omega = vec![theta.cos(), theta.sin()];
                            let x = embed(&scaled(&omega, radius), ambient);
                            let sample = sphere_sample(radius, n, ambient, x, S::one())?;
                            let base = w * jac * gw;
                            sums.add(base * f(&sample), base);
                        }
                    }
                    Some((dir, cos_gamma)) => {
                        let gamma = cos_gamma.min(S::one()).max(-S::one()).acos();
                        let theta_c = dir[1].atan2(dir[0]);
                        let rule = GaussLegendre::new(32 << level.min(4));
                        let mut acc = PairSum::new();
                        for (node, w) in rule.nodes.iter().zip(&rule.weights) {
                            let theta = theta_c + gamma * *node;
                            let omega = vec![theta.cos(), theta.sin()];
                            let x = embed(&scaled(&omega, radius), ambient);
                            let sample = sphere_sample(radius, n, ambient, x, S::one())?;
                            acc.add(*w * f(&sample), *w);
                        }
                        sums.add_scaled(&acc, gamma * jac * gw);
                    }
                }
                Ok(())
            }
            2 => {
                let (pole, mu_min) = match &cap {
                    Some((dir, cg)) => (dir.clone(), *cg),
                    None => {
                        let mut e = vec![S::zero(); 3];
                        e[2] = S::one();
                        (e, -S::one())
                    }
                };
                let frame = complete_frame(&pole, 3)?;
                let (e1, e2) = (&frame[0], &frame[1]);
                let n_mu = (16usize << level).min(512);
                let n_phi = (32usize << level).min(1024);
                let mu_rule = GaussLegendre::new(n_mu);
                let w_phi = S::two() * S::PI() / S::of_usize(n_phi);
                let mut local = PairSum::new();
                for (mu_node, w_mu) in mu_rule.nodes.iter().zip(&mu_rule.weights) {
                    let mu = (mu_min + S::one()) * S::half()
                        + (S::one() - mu_min) * S::half() * *mu_node;
                    let sin_t = (S::one() - mu * mu).max(S::zero()).sqrt();
                    let mut ring = PairSum::new();
                    for j in 0..n_phi {
                        let phi = (S::of_usize(j) + S::half()) * w_phi;
                        let mut omega = scaled(&pole, mu);
                        axpy(&mut omega, sin_t * phi.cos(), e1);
                        axpy(&mut omega, sin_t * phi.sin(), e2);
                        let x = embed(&scaled(&omega, radius), ambient);
                        let sample = sphere_sample(radius, n, ambient, x, S::one())?;
                        ring.add(f(&sample), S::one());
                    }
                    local.add_scaled(&ring, w_phi * *w_mu * (S::one() - mu_min) * S::half());
                }
                sums.add_scaled(&local, jac * gw);
                Ok(())
            }
            _ => Err(Error::Unsupported(
                "sphere quadrature implemented for n <= 2".into(),
            )),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn cylinder_accumulate<F: Fn(&GeometrySample<S>) -> S>(
        &self,
        c: &CylinderData<S>,
        weighting: Weighting<S>,
        region: &Region<S>,
        quad: &QuadratureSpec<S>,
        level: u32,
        sums: &mut PairSum<S>,
        f: &F,
    ) -> Result<()> {
        let n = self.dimension();
        let k = c.sphere_dim;
        let axis_dim = n - k;
        let ambient = self.ambient_dim();
        let rho = c.radius;
        let gauss_cap = match weighting {
            Weighting::Gaussian(t) => Some(quad.gaussian_cutoff(t, n)),
            Weighting::Lebesgue => None,
        };
        // |y| window from the region, the inner-radius exclusion and the cap.
        let to_axis = |r_sq: S| -> Option<S> {
            let v = r_sq - rho * rho;
            (v >= S::zero()).then(|| v.sqrt())
        };
        let sphere_nodes = sphere_factor_nodes::<S>(k, rho, level)?;
        match region {
            Region::Full | Region::Ball(_) | Region::Annulus(_, _) => {
                let (lo_r, hi_r) = radial_window(region, gauss_cap)?;
                let mut y_lo = match to_axis(lo_r * lo_r) {
                    Some(v) => v,
                    None => S::zero(),
                };
                if lo_r <= rho {
                    y_lo = S::zero();
                }
                if c.inner_radius > S::zero() {
                    if let Some(v) = to_axis(c.inner_radius * c.inner_radius) {
                        y_lo = y_lo.max(v);
                    }
                }
                let mut hi = hi_r;
                if let Some(cap) = gauss_cap {
                    hi = hi.min(cap);
                }
                let y_hi = match to_axis(hi * hi) {
                    Some(v) => v,
                    None => return Ok(()),
                };
                if y_hi <= y_lo {
                    return Ok(());
                }
                match axis_dim {
                    1 => {
                        let rule = GaussLegendre::new(16);
                        let intervals = [(y_lo, y_hi), (-y_hi, -y_lo)];
                        for (omega, w_s) in &sphere_nodes {
                            for &(a, b) in &intervals {
                                if b <= a {
                                    continue;
                                }
                                for (pa, pb) in radial_panels(a, b, weighting, level) {
                                    let mut acc = PairSum::new();
                                    for (node, w_r) in rule.nodes.iter().zip(&rule.weights) {
                                        let y = (pa + pb) * S::half()
                                            + (pb - pa) * S::half() * *node;
                                        let x = cylinder_point(omega, rho, &[y], k, ambient);
                                        let sample =
                                            cylinder_sample(c, n, ambient, x, S::one())?;
                                        let gw =
                                            gaussian_factor(weighting, sample.radius_sq());
                                        let base = *w_r * gw;
                                        acc.add(base * f(&sample), base);
                                    }
                                    sums.add_scaled(&acc, (pb - pa) * S::half() * *w_s);
                                }
                            }
                        }
                        Ok(())
                    }
                    2 => {
                        let rule = GaussLegendre::new(16);
                        let n_psi = (32usize << level).min(512);
                        let w_psi = S::two() * S::PI() / S::of_usize(n_psi);
                        for (omega, w_s) in &sphere_nodes {
                            for (pa, pb) in radial_panels(y_lo, y_hi, weighting, level) {
                                for jpsi in 0..n_psi {
                                    let psi = (S::of_usize(jpsi) + S::half()) * w_psi;
                                    let mut acc = PairSum::new();
                                    for (node, w_r) in rule.nodes.iter().zip(&rule.weights) {
                                        let s = (pa + pb) * S::half()
                                            + (pb - pa) * S::half() * *node;
                                        let y = [s * psi.cos(), s * psi.sin()];
                                        let x = cylinder_point(omega, rho, &y, k, ambient);
                                        let sample =
                                            cylinder_sample(c, n, ambient, x, S::one())?;
                                        let gw =
                                            gaussian_factor(weighting, sample.radius_sq());
                                        let base = *w_r * s * gw;
                                        acc.add(base * f(&sample), base);
                                    }
                                    sums.add_scaled(&acc, (pb - pa) * S::half() * w_psi * *w_s);
                                }
                            }
                        }
                        Ok(())
                    }
                    _ => Err(Error::Unsupported(
                        "cylinder axis factors of dimension <= 2 only".into(),
                    )),
                }
            }
            Region::BallAt { center, radius: rc } => {
                if axis_dim != 1 {
                    return Err(Error::Unsupported(
                        "off-center balls on cylinders need an axis of dimension 1".into(),
                    ));
                }
                if center.len() != ambient {
                    return Err(Error::OutOfDomain("ball center dimension mismatch".into()));
                }
                let c_axis = center[k + 1];
                let rule = GaussLegendre::new(16);
                let y0 = if c.inner_radius > S::zero() {
                    to_axis(c.inner_radius * c.inner_radius)
                } else {
                    None
                };
                for (omega, w_s) in &sphere_nodes {
                    // |rho*omega - c_sphere|^2 within the sphere-factor coords
                    // plus any center components outside the cylinder's
                    // coordinate block.
                    let mut d_sq = S::zero();
                    for i in 0..=k {
                        let d = rho * omega[i] - center[i];
                        d_sq += d * d;
                    }
                    for (i, &v) in center.iter().enumerate() {
                        if i > k + 1 {
                            d_sq += v * v;
                        }
                    }
                    let room = *rc * *rc - d_sq;
                    if room <= S::zero() {
                        continue;
                    }
                    let half = room.sqrt();
                    let mut intervals = vec![(c_axis - half, c_axis + half)];
                    if let Some(y0) = y0 {
                        intervals = exclude_interval(&intervals, -y0, y0);
                    }
                    if let Some(cap) = gauss_cap {
                        if let Some(ycap) = to_axis(cap * cap) {
                            intervals = clip_interval(&intervals, -ycap, ycap);
                        } else {
                            continue;
                        }
                    }
                    for (a, b) in intervals {
                        if b <= a {
                            continue;
                        }
                        for (pa, pb) in radial_panels(a, b, weighting, level) {
                            let mut acc = PairSum::new();
                            for (node, w_r) in rule.nodes.iter().zip(&rule.weights) {
                                let y =
                                    (pa + pb) * S::half() + (pb - pa) * S::half() * *node;
                                let x = cylinder_point(omega, rho, &[y], k, ambient);
                                let sample = cylinder_sample(c, n, ambient, x, S::one())?;
                                let gw = gaussian_factor(weighting, sample.radius_sq());
                                let base = *w_r * gw;
                                acc.add(base * f(&sample), base);
                            }
                            sums.add_scaled(&acc, (pb - pa) * S::half() * *w_s);
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn push_discrete<S: Real, F: Fn(&GeometrySample<S>) -> S>(
    sample: &GeometrySample<S>,
    weighting: Weighting<S>,
    region: &Region<S>,
    sums: &mut PairSum<S>,
    f: &F,
) {
    if !region_contains(region, &sample.position) {
        return;
    }
    let gw = gaussian_factor(weighting, sample.radius_sq());
    let base = sample.weight * gw;
    sums.add(base * f(sample), base);
}

pub(crate) fn region_contains<S: Real>(region: &Region<S>, x: &[S]) -> bool {
    match region {
        Region::Full => true,
        Region::Ball(r) => norm_sq(x) <= *r * *r,
        Region::Annulus(a, b) => {
            let r_sq = norm_sq(x);
            r_sq >= *a * *a && r_sq <= *b * *b
        }
        Region::BallAt { center, radius } => {
            let mut d = S::zero();
            for (xi, ci) in x.iter().zip(center) {
                let v = *xi - *ci;
                d += v * v;
            }
            d <= *radius * *radius
        }
    }
}

#[inline]
fn gaussian_factor<S: Real>(weighting: Weighting<S>, r_sq: S) -> S {
    match weighting {
        Weighting::Lebesgue => S::one(),
        Weighting::Gaussian(t) => (-r_sq / (S::four() * t)).exp(),
    }
}

/// Radial `|X|` window implied by a radially symmetric region.
fn radial_window<S: Real>(region: &Region<S>, gauss_cap: Option<S>) -> Result<(S, S)> {
    let hi_default = match gauss_cap {
        Some(c) => c,
        None => S::infinity(),
    };
    match region {
        Region::Full => {
            if hi_default.is_infinite() {
                Err(Error::Unsupported(
                    "unbounded Lebesgue integral".into(),
                ))
            } else {
                Ok((S::zero(), hi_default))
            }
        }
        Region::Ball(r) => Ok((S::zero(), *r)),
        Region::Annulus(a, b) => {
            if *a > *b {
                Err(Error::OutOfDomain("annulus with inner > outer".into()))
            } else {
                Ok((*a, *b))
            }
        }
        Region::BallAt { .. } => unreachable!("BallAt handled separately"),
    }
}

/// Panels for a 1-D range; the Gaussian scale controls the base panel width.
fn radial_panels<S: Real>(lo: S, hi: S, weighting: Weighting<S>, level: u32) -> Vec<(S, S)> {
    let range = hi - lo;
    if range <= S::zero() {
        return Vec::new();
    }
    let scale = match weighting {
        Weighting::Gaussian(t) => (t.sqrt() * S::two()).min(range),
        Weighting::Lebesgue => range / S::lit(6.0),
    };
    let base = (range / scale)
        .ceil()
        .to_usize()
        .unwrap_or(8)
        .clamp(2, 64);
    let count = (base << level.min(8)).min(8192);
    let step = range / S::of_usize(count);
    (0..count)
        .map(|i| {
            let a = lo + step * S::of_usize(i);
            let b = if i + 1 == count {
                hi
            } else {
                lo + step * S::of_usize(i + 1)
            };
            (a, b)
        })
        .collect()
}

/// Quadrature nodes on the parameter sphere `S^{n-1}` of a plane.
fn param_sphere_nodes<S: Real>(n: usize, level: u32) -> Result<Vec<(Vec<S>, S)>> {
    match n {
        1 => Ok(vec![(vec![S::one()], S::one()), (vec![-S::one()], S::one())]),
        2 => {
            let count = (48usize << level).min(768);
            let w = S::two() * S::PI() / S::of_usize(count);
            Ok((0..count)
                .map(|j| {
                    let theta = (S::of_usize(j) + S::half()) * w;
                    (vec![theta.cos(), theta.sin()], w)
                })
                .collect())
        }
        3 => {
            let n_mu = (12usize << level).min(192);
            let n_phi = (24usize << level).min(384);
            let rule = GaussLegendre::<S>::new(n_mu);
            let w_phi = S::two() * S::PI() / S::of_usize(n_phi);
            let mut out = Vec::with_capacity(n_mu * n_phi);
            for (mu, w_mu) in rule.nodes.iter().zip(&rule.weights) {
                let sin_t = (S::one() - *mu * *mu).max(S::zero()).sqrt();
                for j in 0..n_phi {
                    let phi = (S::of_usize(j) + S::half()) * w_phi;
                    out.push((
                        vec![sin_t * phi.cos(), sin_t * phi.sin(), *mu],
                        *w_mu * w_phi,
                    ));
                }
            }
            Ok(out)
        }
        _ => Err(Error::Unsupported(
            "plane quadrature implemented for n <= 3".into(),
        )),
    }
}

/// Nodes on the sphere factor `S^k` of a cylinder, weights including the
/// `rho^k` area scaling.
fn sphere_factor_nodes<S: Real>(k: usize, rho: S, level: u32) -> Result<Vec<(Vec<S>, S)>> {
    let base = param_sphere_nodes::<S>(k + 1, level)?;
    let jac = rho.powi(k as i32);
    Ok(base
        .into_iter()
        .map(|(omega, w)| (omega, w * jac))
        .collect())
}

fn cylinder_point<S: Real>(omega: &[S], rho: S, y: &[S], k: usize, ambient: usize) -> Vec<S> {
    let mut x = vec![S::zero(); ambient];
    for i in 0..=k {
        x[i] = rho * omega[i];
    }
    for (j, &v) in y.iter().enumerate() {
        x[k + 1 + j] = v;
    }
    x
}

fn scaled<S: Real>(v: &[S], c: S) -> Vec<S> {
    v.iter().map(|&x| x * c).collect()
}

/// Plane direction `E * omega` in ambient coordinates.
fn plane_direction<S: Real>(p: &PlaneData<S>, omega: &[S]) -> Vec<S> {
    let mut dir = vec![S::zero(); p.basis[0].len()];
    for (e, c) in p.basis.iter().zip(omega) {
        axpy(&mut dir, *c, e);
    }
    dir
}

/// Remove `{s : base + 2 beta s + s^2 < excl_sq}` from the intervals (the
/// part of the ray inside a ball of squared radius `excl_sq` around the
/// origin; `base = |p|^2`, `beta = <p, omega>`).
fn exclude_ball<S: Real>(intervals: &[(S, S)], base: S, beta: S, excl_sq: S) -> Vec<(S, S)> {
    let disc = beta * beta - (base - excl_sq);
    if disc <= S::zero() {
        return intervals.to_vec();
    }
    let root = disc.sqrt();
    exclude_interval(intervals, -beta - root, -beta + root)
}

/// Clip the intervals to `{s : base + 2 beta s + s^2 <= cap_sq}`.
fn clip_to_ball<S: Real>(intervals: &[(S, S)], base: S, beta: S, cap_sq: S) -> Vec<(S, S)> {
    let disc = beta * beta - (base - cap_sq);
    if disc <= S::zero() {
        return Vec::new();
    }
    let root = disc.sqrt();
    clip_interval(intervals, -beta - root, -beta + root)
}

fn exclude_interval<S: Real>(intervals: &[(S, S)], lo: S, hi: S) -> Vec<(S, S)> {
    let mut out = Vec::new();
    for &(a, b) in intervals {
        if hi <= a || lo >= b {
            out.push((a, b));
            continue;
        }
        if lo > a {
            out.push((a, lo));
        }
        if hi < b {
            out.push((hi, b));
        }
    }
    out
}

fn clip_interval<S: Real>(intervals: &[(S, S)], lo: S, hi: S) -> Vec<(S, S)> {
    let mut out = Vec::new();
    for &(a, b) in intervals {
        let na = a.max(lo);
        let nb = b.min(hi);
        if nb > na {
            out.push((na, nb));
        }
    }
    out
}

fn unit_ball_volume<S: Real>(n: usize) -> S {
    // V_n = pi^{n/2} / Gamma(n/2 + 1); small n only.
    match n {
        1 => S::two(),
        2 => S::PI(),
        3 => S::four() * S::PI() / S::lit(3.0),
        _ => S::PI().powf(S::of_usize(n) * S::half()),
    }
}

pub(crate) fn sphere_area<S: Real>(n: usize) -> S {
    // |S^n| for the unit n-sphere.
    match n {
        0 => S::two(),
        1 => S::two() * S::PI(),
        2 => S::four() * S::PI(),
        3 => S::two() * S::PI() * S::PI(),
        _ => unit_ball_volume::<S>(n + 1) * S::of_usize(n + 1),
    }
}
