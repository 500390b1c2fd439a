//! Curvature-integral regularity quantities: annulus profiles of `|B|^p`,
//! the scaled space-time integral `I_{X0,t0}` of the self-similar flow, the
//! curvature-estimate ratio scan, and end volume growth.

use crate::error::{Error, Result};
use crate::geom::{QuadratureSpec, Region, ShrinkerSurface, SurfaceKind, Weighting};
use crate::numerics::{CompensatedSum, GaussLegendre};
use crate::scalar::{norm, Real};

/// Annulus integrals `int_{M cap (B_2r \ B_r)} |B|^p dmu`.
#[derive(Debug, Clone)]
pub struct AnnulusCurvatureProfile<S: Real> {
    pub p: S,
    pub radii: Vec<S>,
    pub values: Vec<S>,
    /// `sup_{radii[j] >= radii[i]} values[j]` per starting index.
    pub running_sup: Vec<S>,
    pub notes: Vec<String>,
}

impl<S: Real> AnnulusCurvatureProfile<S> {
    /// Crude decay flag: the tail half must fall below half the head half.
    pub fn tends_to_zero(&self) -> bool {
        if self.values.is_empty() {
            return false;
        }
        let mid = self.values.len() / 2;
        let head = self.values[..mid.max(1)]
            .iter()
            .cloned()
            .fold(S::zero(), S::max);
        let tail = self.values[mid..].iter().cloned().fold(S::zero(), S::max);
        tail <= head * S::half() || tail <= S::lit(1e-12)
    }
}

/// Per-annulus Lebesgue integrals of `|B|^p`.
pub fn annulus_profile<S: Real>(
    surface: &ShrinkerSurface<S>,
    p: S,
    radii: &[S],
    quad: &QuadratureSpec<S>,
) -> Result<AnnulusCurvatureProfile<S>> {
    let n = S::of_usize(surface.dimension());
    if !(p >= n && p <= n + S::two()) {
        return Err(Error::Precondition {
            what: "exponent must satisfy n <= p <= n + 2".into(),
            measured: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii.iter().any(|&r| !(r > S::zero())) {
        return Err(Error::Precondition {
            what: "radii must be positive ascending".into(),
            measured: f64::NAN,
        });
    }
    let mut values = Vec::with_capacity(radii.len());
    let mut notes = Vec::new();
    for &r in radii {
        let region = Region::Annulus(r, S::two() * r);
        let v = surface
            .integrate(Weighting::Lebesgue, &region, quad, |s| {
                s.b_norm.powf(p)
            })?
            .value;
        if v == S::zero() {
            notes.push(format!("annulus [{r}, {}] misses the surface or carries no curvature", S::two() * r));
        }
        values.push(v);
    }
    let mut running_sup = vec![S::zero(); values.len()];
    let mut acc = S::zero();
    for i in (0..values.len()).rev() {
        acc = acc.max(values[i]);
        running_sup[i] = acc;
    }
    Ok(AnnulusCurvatureProfile {
        p,
        radii: radii.to_vec(),
        values,
        running_sup,
        notes,
    })
}

/// Grid controls for the `(rho, rho')` supremum.
#[derive(Debug, Clone)]
pub struct EvalIGrid<S: Real> {
    /// Initial number of `rho` grid points.
    pub rho_points: usize,
    /// Refinement passes (each doubles the grid).
    pub max_refinements: u32,
    /// Relative stabilization target between passes.
    pub stability_tol: S,
}

impl<S: Real> Default for EvalIGrid<S> {
    fn default() -> Self {
        Self {
            rho_points: 9,
            max_refinements: 3,
            stability_tol: S::lit(0.01),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalIReport<S: Real> {
    pub value: S,
    pub sup_rho: S,
    pub sup_rho_prime: S,
    pub grid_points: usize,
    pub refinements: u32,
    pub history: Vec<S>,
    pub stabilized: bool,
}

/// The scaled space-time curvature integral of the self-similar flow
/// `sqrt(-t) M`:
///
/// `I = sup_{sqrt(-t0) <= rho < rho' <= 2}
///    2 (rho'^2 - rho^2)^{-(n+2-p)/2}
///    int_{1/rho'}^{1/rho} r^{p-n-3} ( int_{M cap B_{2r}(r X0)} |B|^p ) dr`.
pub fn eval_i<S: Real>(
    surface: &ShrinkerSurface<S>,
    x0: &[S],
    t0: S,
    p: S,
    grid: &EvalIGrid<S>,
    quad: &QuadratureSpec<S>,
    shrinker_tol: S,
) -> Result<EvalIReport<S>> {
    let n = surface.dimension();
    let nf = S::of_usize(n);
    if !(t0 > -S::lit(0.25) && t0 < S::zero()) {
        return Err(Error::Precondition {
            what: "self-similar specialization needs -1/4 < t0 < 0".into(),
            measured: t0.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(p >= nf && p <= nf + S::two()) {
        return Err(Error::Precondition {
            what: "exponent must satisfy n <= p <= n + 2".into(),
            measured: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    surface.require_shrinker(quad, shrinker_tol)?;
    let rho_min = (-t0).sqrt();
    let rho_max = S::two();
    let exponent = -(nf + S::two() - p) * S::half();
    let rule = GaussLegendre::new(16);
    let inner_quad = QuadratureSpec {
        tol: (quad.tol * S::lit(1e3)).min(S::lit(1e-7)),
        ..quad.clone()
    };
    let mut history = Vec::new();
    let mut report: Option<EvalIReport<S>> = None;
    let mut points = grid.rho_points.max(3);
    for pass in 0..=grid.max_refinements {
        // rho grid; r-breakpoints are the reciprocals.
        let rho: Vec<S> = (0..points)
            .map(|i| {
                rho_min + (rho_max - rho_min) * S::of_usize(i) / S::of_usize(points - 1)
            })
            .collect();
        // Segment integrals S_i = int_{1/rho_{i+1}}^{1/rho_i} r^{p-n-3} A(r) dr.
        let mut segments = vec![S::zero(); points - 1];
        for i in 0..points - 1 {
            let r_lo = S::one() / rho[i + 1];
            let r_hi = S::one() / rho[i];
            let mut acc = CompensatedSum::new();
            // a couple of panels per segment keeps A(r) evaluations modest
            let panels = 2usize;
            let step = (r_hi - r_lo) / S::of_usize(panels);
            for k in 0..panels {
                let a = r_lo + step * S::of_usize(k);
                let b = if k + 1 == panels { r_hi } else { a + step };
                let mid = (a + b) * S::half();
                let half = (b - a) * S::half();
                let mut panel = S::zero();
                for (node, w) in rule.nodes.iter().zip(&rule.weights) {
                    let r = mid + half * *node;
                    let center: Vec<S> = x0.iter().map(|&c| c * r).collect();
                    let ball = Region::BallAt {
                        center,
                        radius: S::two() * r,
                    };
                    let a_r = surface
                        .integrate(Weighting::Lebesgue, &ball, &inner_quad, |s| {
                            s.b_norm.powf(p)
                        })?
                        .value;
                    panel += *w * r.powf(p - nf - S::lit(3.0)) * a_r;
                }
                acc.add(panel * half);
            }
            segments[i] = acc.value();
        }
        // Supremum over grid pairs via partial sums.
        let mut best = S::zero();
        let mut best_pair = (rho[0], rho[1]);
        for a in 0..points - 1 {
            let mut partial = S::zero();
            for b in (a + 1)..points {
                partial += segments[b - 1];
                let prefactor = S::two()
                    * (rho[b] * rho[b] - rho[a] * rho[a]).powf(exponent);
                let candidate = prefactor * partial;
                if candidate > best {
                    best = candidate;
                    best_pair = (rho[a], rho[b]);
                }
            }
        }
        history.push(best);
        let stabilized = history.len() >= 2 && {
            let prev = history[history.len() - 2];
            (best - prev).abs() <= grid.stability_tol * best.abs().max(S::lit(1e-30))
        };
        report = Some(EvalIReport {
            value: best,
            sup_rho: best_pair.0,
            sup_rho_prime: best_pair.1,
            grid_points: points,
            refinements: pass,
            history: history.clone(),
            stabilized,
        });
        if stabilized {
            break;
        }
        points = points * 2 - 1;
    }
    let report = report.expect("at least one pass");
    if !report.stabilized && report.value > S::lit(1e-12) {
        return Err(Error::NotConverged(format!(
            "sup did not stabilize within {} refinements; history {:?}",
            grid.max_refinements,
            report
                .history
                .iter()
                .map(|v| format!("{v:.6e}"))
                .collect::<Vec<_>>()
        )));
    }
    Ok(report)
}

/// Scan of `sup_{s >= 1} (s^{2a} - 1)/(s^2 - 1)^a`.
#[derive(Debug, Clone)]
pub struct AlphaScan<S: Real> {
    pub alpha: S,
    pub supremum: S,
    pub monotone: bool,
}

/// The supremum equals 1 for every `a` in `(0, 1]`, approached from below.
pub fn alpha_supremum_scan<S: Real>(alphas: &[S]) -> Result<Vec<AlphaScan<S>>> {
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha > S::zero() && alpha <= S::one()) {
            return Err(Error::Precondition {
                what: "alpha must lie in (0, 1]".into(),
                measured: alpha.to_f64().unwrap_or(f64::NAN),
            });
        }
        let mut sup = S::zero();
        let mut monotone = true;
        let mut prev = S::neg_infinity();
        // log grid from 1 + 1e-6 out to 1e12 (the far range drives the
        // supremum toward its limit for small alpha)
        let count = 4000usize;
        for i in 0..=count {
            let frac = S::of_usize(i) / S::of_usize(count);
            // s - 1 spans [1e-6, 1e12]
            let s = S::one() + S::lit(1e-6) * S::lit(1e18).powf(frac);
            let value = ((s.powf(S::two() * alpha)) - S::one())
                / ((s * s - S::one()).powf(alpha));
            if value < prev - S::lit(1e-12) {
                monotone = false;
            }
            prev = value;
            sup = sup.max(value);
        }
        out.push(AlphaScan {
            alpha,
            supremum: sup,
            monotone,
        });
    }
    Ok(out)
}

/// One row of the curvature-estimate ratio scan.
#[derive(Debug, Clone)]
pub struct CurvatureRatio<S: Real> {
    pub r: S,
    pub t: S,
    /// `sup_{M cap ∂B_{(r+1)t}} |B|`.
    pub lhs: S,
    /// `(1/t) (sup_{s >= r} int_{B_2s \ B_s} |B|^p)^{1/p}`.
    pub rhs_core: S,
    pub ratio: S,
    /// Whether the annulus profile used for the right side tends to zero.
    pub hypothesis_met: bool,
}

/// Evaluate the curvature-estimate ratio at one `(r, t)` against a
/// previously computed annulus profile.
pub fn curvature_estimate_ratio<S: Real>(
    surface: &ShrinkerSurface<S>,
    p: S,
    r: S,
    t: S,
    profile: &AnnulusCurvatureProfile<S>,
) -> Result<CurvatureRatio<S>> {
    if !(t > S::four()) {
        return Err(Error::Precondition {
            what: "ratio scan needs t > 4".into(),
            measured: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    let slice_radius = (r + S::one()) * t;
    let lhs = slice_sup_b(surface, slice_radius)?;
    // sup over the profile radii >= r; past the grid, fall back to the tail
    let sup = match profile.radii.iter().position(|&pr| pr >= r) {
        Some(i) => profile.running_sup[i],
        None => profile.values.last().copied().unwrap_or(S::zero()),
    };
    let rhs_core = sup.powf(S::one() / p) / t;
    let ratio = if lhs == S::zero() {
        S::zero()
    } else if rhs_core == S::zero() {
        S::infinity()
    } else {
        lhs / rhs_core
    };
    Ok(CurvatureRatio {
        r,
        t,
        lhs,
        rhs_core,
        ratio,
        hypothesis_met: profile.tends_to_zero(),
    })
}

/// Largest `|B|` on the sphere slice `M cap ∂B_radius`.
fn slice_sup_b<S: Real>(surface: &ShrinkerSurface<S>, radius: S) -> Result<S> {
    let empty = || Error::EmptyCrossSection {
        scale: radius.to_f64().unwrap_or(f64::NAN),
    };
    match surface.kind() {
        SurfaceKind::Plane(p) => {
            if radius < p.inner_radius {
                return Err(empty());
            }
            Ok(S::zero())
        }
        SurfaceKind::RoundSphere(s) => {
            if (s.radius - radius).abs() > S::lit(1e-9) * (S::one() + radius) {
                return Err(empty());
            }
            Ok(S::of_usize(surface.dimension()).sqrt() / s.radius)
        }
        SurfaceKind::RoundCylinder(c) => {
            let min_r = c.radius.max(c.inner_radius);
            if radius < min_r {
                return Err(empty());
            }
            Ok(S::of_usize(c.sphere_dim).sqrt() / c.radius)
        }
        SurfaceKind::TriangleMesh(d) => {
            let mut sup = S::zero();
            let mut hit = false;
            for f in &d.faces {
                for e in 0..3 {
                    let a = f[e];
                    let b = f[(e + 1) % 3];
                    let ra = norm(&d.vertices[a]);
                    let rb = norm(&d.vertices[b]);
                    if (ra - radius) * (rb - radius) <= S::zero() {
                        sup = sup.max(d.samples[a].b_norm.max(d.samples[b].b_norm));
                        hit = true;
                    }
                }
            }
            if !hit {
                return Err(empty());
            }
            Ok(sup)
        }
        SurfaceKind::PolylineCurve(d) => {
            let count = d.vertices.len();
            let segs = if d.closed { count } else { count - 1 };
            let mut sup = S::zero();
            let mut hit = false;
            for i in 0..segs {
                let a = i;
                let b = (i + 1) % count;
                let ra = norm(&d.vertices[a]);
                let rb = norm(&d.vertices[b]);
                if (ra - radius) * (rb - radius) <= S::zero() {
                    sup = sup.max(d.samples[a].b_norm.max(d.samples[b].b_norm));
                    hit = true;
                }
            }
            if !hit {
                return Err(empty());
            }
            Ok(sup)
        }
        SurfaceKind::GraphPatch(d) => {
            let h = d.function.spacing();
            let mut sup = S::zero();
            let mut hit = false;
            for s in d.samples.iter().flatten() {
                if (s.radius() - radius).abs() <= h {
                    sup = sup.max(s.b_norm);
                    hit = true;
                }
            }
            if !hit {
                return Err(empty());
            }
            Ok(sup)
        }
    }
}

/// End volume-growth curve `V~_s(r) = r^{s-n} vol(E_r)` with the
/// differential-inequality residuals.
#[derive(Debug, Clone)]
pub struct VolumeGrowthCurve<S: Real> {
    pub shift: S,
    pub radii: Vec<S>,
    pub values: Vec<S>,
    /// `d/dr V~_s - (V~_s / r)(s - 2 (int |H|^p)^{2/p} (int 1)^{-2/p})`,
    /// by centered differences; the inequality direction expects these to be
    /// `>= -tolerance`.
    pub residuals: Vec<S>,
    /// `int_{E cap (B_2r \ B_r)} |H|^p` per radius (the mean-curvature
    /// integrability proxy).
    pub h_annulus: Vec<S>,
    /// Whether the mean-curvature proxy stays bounded along the grid.
    pub h_hypothesis_met: bool,
}

/// Compute the volume-growth curve of an exterior surface (its boundary
/// must sit inside the smallest radius).
pub fn volume_growth<S: Real>(
    surface: &ShrinkerSurface<S>,
    shift: S,
    p: S,
    radii: &[S],
    quad: &QuadratureSpec<S>,
) -> Result<VolumeGrowthCurve<S>> {
    if !(shift >= S::zero() && shift < S::one()) {
        return Err(Error::Precondition {
            what: "shift must lie in [0, 1)".into(),
            measured: shift.to_f64().unwrap_or(f64::NAN),
        });
    }
    if !(p >= S::two()) {
        return Err(Error::Precondition {
            what: "mean-curvature exponent needs p >= 2".into(),
            measured: p.to_f64().unwrap_or(f64::NAN),
        });
    }
    if radii.len() < 3 || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition {
            what: "need an ascending radius grid with at least 3 points".into(),
            measured: radii.len() as f64,
        });
    }
    let inner = surface.inner_radius();
    if radii[0] <= inner {
        return Err(Error::Precondition {
            what: "the end's boundary must sit inside the smallest radius".into(),
            measured: inner.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = S::of_usize(surface.dimension());
    let mut values = Vec::with_capacity(radii.len());
    let mut areas = Vec::with_capacity(radii.len());
    let mut h_terms = Vec::with_capacity(radii.len());
    let mut h_annulus = Vec::with_capacity(radii.len());
    for &r in radii {
        let area = surface
            .integrate(Weighting::Lebesgue, &Region::Ball(r), quad, |_| S::one())?
            .value;
        if area <= S::zero() {
            return Err(Error::EmptyCrossSection {
                scale: r.to_f64().unwrap_or(f64::NAN),
            });
        }
        let h_int = surface
            .integrate(Weighting::Lebesgue, &Region::Ball(r), quad, |s| {
                s.h_norm().powf(p)
            })?
            .value;
        let h_ann = surface
            .integrate(
                Weighting::Lebesgue,
                &Region::Annulus(r, S::two() * r),
                quad,
                |s| s.h_norm().powf(p),
            )?
            .value;
        values.push(r.powf(shift - n) * area);
        areas.push(area);
        h_terms.push(h_int);
        h_annulus.push(h_ann);
    }
    let mut residuals = vec![S::zero(); radii.len()];
    for i in 1..radii.len() - 1 {
        let dv = (values[i + 1] - values[i - 1]) / (radii[i + 1] - radii[i - 1]);
        let two_p = S::two() / p;
        let drag = S::two() * h_terms[i].powf(two_p) * areas[i].powf(-two_p);
        residuals[i] = dv - values[i] / radii[i] * (shift - drag);
    }
    residuals[0] = residuals[1];
    let last = radii.len() - 1;
    residuals[last] = residuals[last - 1];
    let mid = h_annulus.len() / 2;
    let head = h_annulus[..mid.max(1)]
        .iter()
        .cloned()
        .fold(S::zero(), S::max);
    let tail = h_annulus[mid..].iter().cloned().fold(S::zero(), S::max);
    let h_hypothesis_met = tail <= head * S::lit(1.25) + S::lit(1e-12);
    Ok(VolumeGrowthCurve {
        shift,
        radii: radii.to_vec(),
        values,
        residuals,
        h_annulus,
        h_hypothesis_met,
    })
}
