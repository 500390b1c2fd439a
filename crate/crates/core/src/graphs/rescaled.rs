//! Checks on the rescaled field `U^a(x, t) = sqrt(t) u^a(x / sqrt(t))`.
//!
//! When `u` solves the shrinker graph equation, `U` satisfies
//! `dU/dt + Lap U = Q` with
//! `Q(x, t) = t^{-1/2} (delta_ij - g^{ij}) u^a_ij |_{x/sqrt(t)}`, and `Q` is
//! dominated by `(c2 / |x|) sum_b |grad U^b|`. Both sides of the identity
//! are computed two ways: by space-time finite differences of `U` and by the
//! algebraic formula; the bound constant `c2` is assembled from the measured
//! decay constants through a Neumann-series estimate of `|delta - g^{ij}|`,
//! valid while `sum_b |grad u^b| < 1/2`.

use crate::error::{Error, Result};
use crate::graphs::function::GraphFunction;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct HeatCheckOptions<S: Real> {
    /// Times of the space-time grid (all > 0).
    pub times: Vec<S>,
    /// Stride over the active grid nodes used as spatial sample points.
    pub node_stride: usize,
    /// Finite-difference spatial step as a multiple of `h * sqrt(t)`.
    pub fd_step_factor: S,
    /// Sup-norm residual gate for the shrinker-graph precondition.
    pub shrinker_tol: S,
    /// Absolute slack added to the right side when counting violations.
    pub slack: S,
}

impl<S: Real> Default for HeatCheckOptions<S> {
    fn default() -> Self {
        Self {
            times: vec![S::one(), S::lit(1.5), S::two(), S::lit(3.0)],
            node_stride: 3,
            fd_step_factor: S::lit(0.75),
            shrinker_tol: S::lit(1e-8),
            slack: S::lit(1e-10),
        }
    }
}

/// One space-time check point.
#[derive(Debug, Clone, Copy)]
pub struct HeatCheckRow<S: Real> {
    pub t: S,
    pub x: [S; 2],
    /// `|dU/dt + Lap U|` by space-time finite differences of `U`.
    pub lhs_fd: S,
    /// `|Q|` by the algebraic identity at `x / sqrt(t)`.
    pub lhs_q: S,
    /// `(c2 / |x|) sum_b |grad U^b|`.
    pub rhs: S,
}

#[derive(Debug, Clone)]
pub struct HeatCheckReport<S: Real> {
    pub rows: Vec<HeatCheckRow<S>>,
    pub violations: usize,
    /// Largest `|lhs_fd - lhs_q|` over all check points.
    pub max_route_gap: S,
    pub c2: S,
    pub c1_prime: S,
    /// Measured decay constant for the Hessian order.
    pub decay_c2m: S,
}

/// Run the rescaled backward-heat consistency and bound check.
pub fn rescaled_heat_check<S: Real>(
    u: &GraphFunction<S>,
    opts: &HeatCheckOptions<S>,
) -> Result<HeatCheckReport<S>> {
    let m = u.components();
    let (_, residual_sup) = u.residual_field()?;
    if residual_sup > opts.shrinker_tol {
        return Err(Error::Precondition {
            what: "graph is not a shrinker graph to tolerance".into(),
            measured: residual_sup.to_f64().unwrap_or(f64::NAN),
        });
    }
    // Neumann regime: sum_b |grad u^b| < 1/2 everywhere.
    let mut grad_sum_sup = S::zero();
    for node in u.active_nodes() {
        let mut s = S::zero();
        for beta in 0..m {
            let d = u.du(node, beta);
            s += (d[0] * d[0] + d[1] * d[1]).sqrt();
        }
        grad_sum_sup = grad_sum_sup.max(s);
    }
    if grad_sum_sup >= S::half() {
        return Err(Error::Precondition {
            what: "gradient sum leaves the Neumann-series regime (needs < 1/2)".into(),
            measured: grad_sum_sup.to_f64().unwrap_or(f64::NAN),
        });
    }
    let c1_prime = S::two().sqrt() * S::half();
    let decay = u.decay_constants();
    let c2 = c1_prime * decay.per_order[2];

    let h = u.spacing();
    let (r_in, r_out) = u.radii();
    let margin = S::four() * h;
    let mut rows = Vec::new();
    let mut violations = 0usize;
    let mut max_gap = S::zero();
    for &t in &opts.times {
        if !(t > S::zero()) {
            return Err(Error::Precondition {
                what: "heat check times must be positive".into(),
                measured: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        let sqrt_t = t.sqrt();
        let h_fd = opts.fd_step_factor * h * sqrt_t;
        let dt = S::lit(0.2) * h * h * t;
        // Sample the scaled image of interior grid nodes; the base point
        // y = x / sqrt(t) is then an exact grid node.
        let mut index = 0usize;
        for node in u.active_nodes() {
            index += 1;
            if index % opts.node_stride != 0 {
                continue;
            }
            let [y0, y1] = u.node_position(node);
            let r_y = (y0 * y0 + y1 * y1).sqrt();
            // Keep the whole finite-difference cloud inside the sampled
            // annulus: |x +- h_fd| / sqrt(t') must stay in [r_in + 4h, r_out - 4h].
            let pad = margin + S::two() * h_fd / sqrt_t;
            if r_y < r_in + pad || r_y > r_out - pad {
                continue;
            }
            let x = [y0 * sqrt_t, y1 * sqrt_t];
            let r_x = r_y * sqrt_t;
            for alpha in 0..m {
                // route (a): finite differences of U
                let u_ct = eval_u(u, x, t, alpha)?;
                let du_dt = (eval_u(u, x, t + dt, alpha)? - eval_u(u, x, t - dt, alpha)?)
                    / (S::two() * dt);
                let lap = (eval_u(u, [x[0] + h_fd, x[1]], t, alpha)?
                    + eval_u(u, [x[0] - h_fd, x[1]], t, alpha)?
                    + eval_u(u, [x[0], x[1] + h_fd], t, alpha)?
                    + eval_u(u, [x[0], x[1] - h_fd], t, alpha)?
                    - S::four() * u_ct)
                    / (h_fd * h_fd);
                let lhs_fd = (du_dt + lap).abs();
                // route (b): Q at the grid node y
                let ginv = u.metric_inverse(node).ok_or_else(|| Error::Precondition {
                    what: format!("singular metric at node {node}"),
                    measured: 0.0,
                })?;
                let dd = u.d2u(node, alpha);
                let q = ((S::one() - ginv[0][0]) * dd[0]
                    + (-ginv[0][1] - ginv[1][0]) * dd[1]
                    + (S::one() - ginv[1][1]) * dd[2])
                    / sqrt_t;
                let lhs_q = q.abs();
                // bound: grad_x U^b(x, t) = Du^b(y)
                let mut grad_sum = S::zero();
                for beta in 0..m {
                    let d = u.du(node, beta);
                    grad_sum += (d[0] * d[0] + d[1] * d[1]).sqrt();
                }
                let rhs = c2 / r_x * grad_sum;
                if lhs_q > rhs + opts.slack {
                    violations += 1;
                }
                max_gap = max_gap.max((lhs_fd - lhs_q).abs());
                rows.push(HeatCheckRow {
                    t,
                    x,
                    lhs_fd,
                    lhs_q,
                    rhs,
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    Ok(HeatCheckReport {
        rows,
        violations,
        max_route_gap: max_gap,
        c2,
        c1_prime,
        decay_c2m: decay.per_order[2],
    })
}

/// `U(x, t) = sqrt(t) u(x / sqrt(t))` through local interpolation.
fn eval_u<S: Real>(u: &GraphFunction<S>, x: [S; 2], t: S, alpha: usize) -> Result<S> {
    let sqrt_t = t.sqrt();
    let jet = u.interpolate(x[0] / sqrt_t, x[1] / sqrt_t, alpha)?;
    Ok(sqrt_t * jet.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn linear_graph_passes_with_zero_sides() {
        let u = GraphFunction::sample(
            2.0,
            8.0,
            0.5,
            1,
            Arc::new(|x, y| vec![0.1 * x - 0.2 * y]),
        )
        .unwrap();
        let report = rescaled_heat_check(&u, &HeatCheckOptions::default()).unwrap();
        assert_eq!(report.violations, 0);
        for row in &report.rows {
            assert!(row.lhs_q < 1e-12, "Q should vanish on linear graphs");
            assert!(row.lhs_fd < 1e-9, "FD route should vanish on linear graphs");
        }
    }

    #[test]
    fn flat_graph_is_all_zeros() {
        let u = GraphFunction::flat(2.0, 8.0, 0.5, 1).unwrap();
        let report = rescaled_heat_check(&u, &HeatCheckOptions::default()).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.max_route_gap < 1e-12);
        assert_eq!(report.c2, 0.0);
    }
}
