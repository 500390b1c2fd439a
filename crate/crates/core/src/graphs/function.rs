//! Vector-valued graph functions sampled on a masked Cartesian grid over a
//! planar annulus, with the finite-difference stencils used by the shrinker
//! graph equation and the rescaled backward-heat checks.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closure producing the `m` height components at a planar point.
pub type HeightFn<S> = Arc<dyn Fn(S, S) -> Vec<S> + Send + Sync>;

/// Stencil flavor along one axis at one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StencilKind {
    Centered,
    Forward,
    Backward,
}

/// Heights `u^alpha` over the annulus `{r_inner <= |x| <= r_outer}` in the
/// plane, sampled with spacing `h` on a Cartesian grid masked to the annulus.
#[derive(Clone)]
pub struct GraphFunction<S: Real> {
    h: S,
    origin: [S; 2],
    nx: usize,
    ny: usize,
    r_inner: S,
    r_outer: S,
    m: usize,
    active: Vec<bool>,
    stencil_x: Vec<Option<StencilKind>>,
    stencil_y: Vec<Option<StencilKind>>,
    values: Vec<S>,
    source: Option<HeightFn<S>>,
}

impl<S: Real> std::fmt::Debug for GraphFunction<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphFunction")
            .field("h", &self.h)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("r_inner", &self.r_inner)
            .field("r_outer", &self.r_outer)
            .field("m", &self.m)
            .finish()
    }
}

impl<S: Real> GraphFunction<S> {
    /// Sample `f` on the annulus `{r_inner <= |x| <= r_outer}` with spacing
    /// `h`. The closure is retained so refinement can resample instead of
    /// interpolating.
    pub fn sample(r_inner: S, r_outer: S, h: S, m: usize, f: HeightFn<S>) -> Result<Self> {
        let mut g = Self::empty(r_inner, r_outer, h, m)?;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let node = j * g.nx + i;
                if !g.active[node] {
                    continue;
                }
                let [x, y] = g.node_position(node);
                let vals = f(x, y);
                assert_eq!(vals.len(), m, "height closure arity");
                for (alpha, v) in vals.into_iter().enumerate() {
                    g.values[node * m + alpha] = v;
                }
            }
        }
        g.source = Some(f);
        Ok(g)
    }

    /// Grid with all heights zero (the flat annulus).
    pub fn flat(r_inner: S, r_outer: S, h: S, m: usize) -> Result<Self> {
        Self::empty(r_inner, r_outer, h, m)
    }

    fn empty(r_inner: S, r_outer: S, h: S, m: usize) -> Result<Self> {
        if !(h > S::zero()) {
            return Err(Error::InvalidSurface("grid spacing must be positive".into()));
        }
        if !(S::zero() < r_inner && r_inner < r_outer) {
            return Err(Error::InvalidSurface(
                "annulus radii must satisfy 0 < R < R_out".into(),
            ));
        }
        if m == 0 {
            return Err(Error::InvalidSurface("codimension must be >= 1".into()));
        }
        // Grid covers the annulus; the origin is offset by half a cell so no
        // node sits exactly on either circle.
        let half = h * S::half();
        let span = r_outer + half;
        let count = (S::two() * span / h).ceil().to_usize().unwrap_or(0) + 1;
        let origin = [-span, -span];
        let mut g = Self {
            h,
            origin,
            nx: count,
            ny: count,
            r_inner,
            r_outer,
            m,
            active: vec![false; count * count],
            stencil_x: vec![None; count * count],
            stencil_y: vec![None; count * count],
            values: vec![S::zero(); count * count * m],
            source: None,
        };
        for j in 0..count {
            for i in 0..count {
                let node = j * count + i;
                let [x, y] = g.node_position(node);
                let r = (x * x + y * y).sqrt();
                g.active[node] = r >= r_inner && r <= r_outer;
            }
        }
        g.assign_stencils()?;
        Ok(g)
    }

    /// Drop active nodes that cannot carry a second-order stencil in both
    /// axes, then record the stencil flavor per node per axis.
    fn assign_stencils(&mut self) -> Result<()> {
        loop {
            let mut dropped = false;
            for node in 0..self.active.len() {
                if !self.active[node] {
                    continue;
                }
                if self.pick_stencil(node, 0).is_none() || self.pick_stencil(node, 1).is_none() {
                    self.active[node] = false;
                    dropped = true;
                }
            }
            if !dropped {
                break;
            }
        }
        let mut any = false;
        for node in 0..self.active.len() {
            if self.active[node] {
                self.stencil_x[node] = self.pick_stencil(node, 0);
                self.stencil_y[node] = self.pick_stencil(node, 1);
                any = true;
            }
        }
        if !any {
            return Err(Error::InvalidSurface(
                "annulus grid has no usable nodes; decrease the spacing".into(),
            ));
        }
        Ok(())
    }

    fn pick_stencil(&self, node: usize, axis: usize) -> Option<StencilKind> {
        let ok = |off: isize| self.neighbor(node, axis, off).map(|k| self.active[k]) == Some(true);
        if ok(-1) && ok(1) {
            Some(StencilKind::Centered)
        } else if ok(1) && ok(2) && ok(3) {
            Some(StencilKind::Forward)
        } else if ok(-1) && ok(-2) && ok(-3) {
            Some(StencilKind::Backward)
        } else {
            None
        }
    }

    fn neighbor(&self, node: usize, axis: usize, off: isize) -> Option<usize> {
        let i = (node % self.nx) as isize;
        let j = (node / self.nx) as isize;
        let (ni, nj) = if axis == 0 { (i + off, j) } else { (i, j + off) };
        if ni < 0 || nj < 0 || ni >= self.nx as isize || nj >= self.ny as isize {
            None
        } else {
            Some(nj as usize * self.nx + ni as usize)
        }
    }

    #[inline]
    pub fn spacing(&self) -> S {
        self.h
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn radii(&self) -> (S, S) {
        (self.r_inner, self.r_outer)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn is_active(&self, node: usize) -> bool {
        self.active[node]
    }

    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.node_count()).filter(|&n| self.active[n])
    }

    #[inline]
    pub fn node_position(&self, node: usize) -> [S; 2] {
        let i = node % self.nx;
        let j = node / self.nx;
        [
            self.origin[0] + S::of_usize(i) * self.h,
            self.origin[1] + S::of_usize(j) * self.h,
        ]
    }

    #[inline]
    pub fn value(&self, node: usize, alpha: usize) -> S {
        self.values[node * self.m + alpha]
    }

    pub fn set_value(&mut self, node: usize, alpha: usize, v: S) {
        self.values[node * self.m + alpha] = v;
        self.source = None;
    }

    pub fn values_mut(&mut self) -> &mut [S] {
        self.source = None;
        &mut self.values
    }

    pub fn source(&self) -> Option<&HeightFn<S>> {
        self.source.as_ref()
    }

    /// First-derivative stencil (offsets, coefficients / h).
    fn d1_stencil(&self, kind: StencilKind) -> ([isize; 4], [S; 4], usize) {
        let h = self.h;
        match kind {
            StencilKind::Centered => (
                [-1, 1, 0, 0],
                [-S::half() / h, S::half() / h, S::zero(), S::zero()],
                2,
            ),
            StencilKind::Forward => (
                [0, 1, 2, 0],
                [
                    S::lit(-1.5) / h,
                    S::two() / h,
                    S::lit(-0.5) / h,
                    S::zero(),
                ],
                3,
            ),
            StencilKind::Backward => (
                [0, -1, -2, 0],
                [S::lit(1.5) / h, -S::two() / h, S::lit(0.5) / h, S::zero()],
                3,
            ),
        }
    }

    /// Second-derivative stencil (offsets, coefficients / h^2).
    fn d2_stencil(&self, kind: StencilKind) -> ([isize; 4], [S; 4], usize) {
        let h2 = self.h * self.h;
        match kind {
            StencilKind::Centered => (
                [-1, 0, 1, 0],
                [S::one() / h2, -S::two() / h2, S::one() / h2, S::zero()],
                3,
            ),
            StencilKind::Forward => (
                [0, 1, 2, 3],
                [
                    S::two() / h2,
                    S::lit(-5.0) / h2,
                    S::four() / h2,
                    -S::one() / h2,
                ],
                4,
            ),
            StencilKind::Backward => (
                [0, -1, -2, -3],
                [
                    S::two() / h2,
                    S::lit(-5.0) / h2,
                    S::four() / h2,
                    -S::one() / h2,
                ],
                4,
            ),
        }
    }

    /// Nodes and coefficients of the first derivative along `axis` at `node`.
    pub fn d1_taps(&self, node: usize, axis: usize) -> Vec<(usize, S)> {
        let kind = if axis == 0 {
            self.stencil_x[node]
        } else {
            self.stencil_y[node]
        }
        .expect("stencil assigned for active node");
        let (offs, coeffs, len) = self.d1_stencil(kind);
        (0..len)
            .map(|k| (self.neighbor(node, axis, offs[k]).unwrap(), coeffs[k]))
            .collect()
    }

    /// Nodes and coefficients of the second derivative along `axis`.
    pub fn d2_taps(&self, node: usize, axis: usize) -> Vec<(usize, S)> {
        let kind = if axis == 0 {
            self.stencil_x[node]
        } else {
            self.stencil_y[node]
        }
        .expect("stencil assigned for active node");
        let (offs, coeffs, len) = self.d2_stencil(kind);
        (0..len)
            .map(|k| (self.neighbor(node, axis, offs[k]).unwrap(), coeffs[k]))
            .collect()
    }

    /// Nodes and coefficients of the mixed derivative `u_{xy}` at `node`,
    /// built by composing the per-axis first-derivative stencils.
    pub fn dxy_taps(&self, node: usize) -> Vec<(usize, S)> {
        let mut taps: Vec<(usize, S)> = Vec::new();
        for (ny_node, cy) in self.d1_taps(node, 1) {
            for (nx_node, cx) in self.d1_taps(ny_node, 0) {
                taps.push((nx_node, cy * cx));
            }
        }
        taps.sort_by_key(|t| t.0);
        taps.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        taps
    }

    fn apply_taps(&self, taps: &[(usize, S)], alpha: usize) -> S {
        let mut acc = S::zero();
        for &(node, c) in taps {
            acc += c * self.value(node, alpha);
        }
        acc
    }

    /// Gradient `(u_x, u_y)` of component `alpha` at `node`.
    pub fn du(&self, node: usize, alpha: usize) -> [S; 2] {
        [
            self.apply_taps(&self.d1_taps(node, 0), alpha),
            self.apply_taps(&self.d1_taps(node, 1), alpha),
        ]
    }

    /// Hessian `(u_xx, u_xy, u_yy)` of component `alpha` at `node`.
    pub fn d2u(&self, node: usize, alpha: usize) -> [S; 3] {
        [
            self.apply_taps(&self.d2_taps(node, 0), alpha),
            self.apply_taps(&self.dxy_taps(node), alpha),
            self.apply_taps(&self.d2_taps(node, 1), alpha),
        ]
    }

    /// Induced metric `g_ij = delta_ij + sum_a u^a_i u^a_j` at `node`.
    pub fn metric(&self, node: usize) -> [[S; 2]; 2] {
        let mut g = [[S::one(), S::zero()], [S::zero(), S::one()]];
        for alpha in 0..self.m {
            let d = self.du(node, alpha);
            for i in 0..2 {
                for j in 0..2 {
                    g[i][j] += d[i] * d[j];
                }
            }
        }
        g
    }

    /// Inverse metric; `None` when the metric is numerically singular.
    pub fn metric_inverse(&self, node: usize) -> Option<[[S; 2]; 2]> {
        let g = self.metric(node);
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if !(det > S::zero()) || !det.is_finite() {
            return None;
        }
        Some([
            [g[1][1] / det, -g[0][1] / det],
            [-g[1][0] / det, g[0][0] / det],
        ])
    }

    pub fn metric_det(&self, node: usize) -> S {
        let g = self.metric(node);
        g[0][0] * g[1][1] - g[0][1] * g[1][0]
    }

    /// Shrinker graph equation residual
    /// `sum_ij g^{ij} u^a_ij - (x . Du^a - u^a) / 2` at `node`.
    pub fn equation_residual(&self, node: usize, alpha: usize) -> Result<S> {
        let ginv = self.metric_inverse(node).ok_or_else(|| Error::Precondition {
            what: format!("singular induced metric at node {node}"),
            measured: 0.0,
        })?;
        let [x, y] = self.node_position(node);
        let d = self.du(node, alpha);
        let dd = self.d2u(node, alpha);
        let trace = ginv[0][0] * dd[0]
            + (ginv[0][1] + ginv[1][0]) * dd[1]
            + ginv[1][1] * dd[2];
        let drift = (x * d[0] + y * d[1] - self.value(node, alpha)) * S::half();
        Ok(trace - drift)
    }

    /// Residual field over active nodes and its sup norm.
    pub fn residual_field(&self) -> Result<(Vec<(usize, Vec<S>)>, S)> {
        let mut field = Vec::new();
        let mut sup = S::zero();
        for node in self.active_nodes() {
            let mut per_alpha = Vec::with_capacity(self.m);
            for alpha in 0..self.m {
                let r = self.equation_residual(node, alpha)?;
                sup = sup.max(r.abs());
                per_alpha.push(r);
            }
            field.push((node, per_alpha));
        }
        if field.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        Ok((field, sup))
    }

    /// Local bicubic Lagrange interpolation of component `alpha` at `(x, y)`:
    /// value, gradient and Hessian of the local polynomial.
    pub fn interpolate(&self, x: S, y: S, alpha: usize) -> Result<InterpJet<S>> {
        let fx = (x - self.origin[0]) / self.h;
        let fy = (y - self.origin[1]) / self.h;
        let ix = fx.floor().to_isize().unwrap_or(-1);
        let iy = fy.floor().to_isize().unwrap_or(-1);
        // 4x4 block whose interior cell contains the point; shift to find a
        // fully active block.
        let mut found: Option<(usize, usize)> = None;
        'outer: for sx in [-1isize, 0, -2] {
            for sy in [-1isize, 0, -2] {
                let bx = ix + sx;
                let by = iy + sy;
                if bx < 0
                    || by < 0
                    || bx + 3 >= self.nx as isize
                    || by + 3 >= self.ny as isize
                {
                    continue;
                }
                let mut all = true;
                for dj in 0..4 {
                    for di in 0..4 {
                        let node = (by + dj) as usize * self.nx + (bx + di) as usize;
                        if !self.active[node] {
                            all = false;
                            break;
                        }
                    }
                    if !all {
                        break;
                    }
                }
                if all {
                    found = Some((bx as usize, by as usize));
                    break 'outer;
                }
            }
        }
        let (bx, by) = found.ok_or_else(|| {
            Error::OutOfDomain(format!("no active 4x4 interpolation block around ({x}, {y})"))
        })?;
        // Local coordinates in units of h relative to the block origin.
        let sx = fx - S::of_usize(bx);
        let sy = fy - S::of_usize(by);
        let (lx, dlx, ddlx) = lagrange4(sx);
        let (ly, dly, ddly) = lagrange4(sy);
        let mut value = S::zero();
        let mut gx = S::zero();
        let mut gy = S::zero();
        let mut hxx = S::zero();
        let mut hxy = S::zero();
        let mut hyy = S::zero();
        for dj in 0..4 {
            for di in 0..4 {
                let node = (by + dj) * self.nx + (bx + di);
                let v = self.value(node, alpha);
                value += v * lx[di] * ly[dj];
                gx += v * dlx[di] * ly[dj];
                gy += v * lx[di] * dly[dj];
                hxx += v * ddlx[di] * ly[dj];
                hxy += v * dlx[di] * dly[dj];
                hyy += v * lx[di] * ddly[dj];
            }
        }
        let h = self.h;
        Ok(InterpJet {
            value,
            grad: [gx / h, gy / h],
            hess: [hxx / (h * h), hxy / (h * h), hyy / (h * h)],
        })
    }

    /// Smallest constants `c_j` with `|D^j u^a(x)| <= c_j |x|^{1-j}` over the
    /// grid, for `j = 0, 1, 2`, together with their maximum.
    pub fn decay_constants(&self) -> DecayConstants<S> {
        let mut c = [S::zero(); 3];
        for node in self.active_nodes() {
            let [x, y] = self.node_position(node);
            let r = (x * x + y * y).sqrt();
            for alpha in 0..self.m {
                let u = self.value(node, alpha).abs();
                let d = self.du(node, alpha);
                let dd = self.d2u(node, alpha);
                let d1 = (d[0] * d[0] + d[1] * d[1]).sqrt();
                // Frobenius norm of the symmetric Hessian.
                let d2 =
                    (dd[0] * dd[0] + S::two() * dd[1] * dd[1] + dd[2] * dd[2]).sqrt();
                c[0] = c[0].max(u / r);
                c[1] = c[1].max(d1);
                c[2] = c[2].max(d2 * r);
            }
        }
        DecayConstants {
            per_order: c,
            max: c[0].max(c[1]).max(c[2]),
        }
    }

    /// Halve the spacing. Resamples the stored closure when present,
    /// otherwise fills new nodes by local interpolation.
    pub fn refined(&self) -> Result<Self> {
        let h2 = self.h * S::half();
        if let Some(f) = &self.source {
            return Self::sample(self.r_inner, self.r_outer, h2, self.m, f.clone());
        }
        let mut fine = Self::empty(self.r_inner, self.r_outer, h2, self.m)?;
        for node in 0..fine.node_count() {
            if !fine.active[node] {
                continue;
            }
            let [x, y] = fine.node_position(node);
            for alpha in 0..self.m {
                let jet = self.interpolate(x, y, alpha)?;
                fine.values[node * fine.m + alpha] = jet.value;
            }
        }
        Ok(fine)
    }

    /// The graph of `x -> u(t x) / t` over the annulus scaled by `1/t`.
    pub fn rescaled(&self, t: S) -> Self {
        let inv = S::one() / t;
        let mut out = self.clone();
        out.h = self.h * inv;
        out.origin = [self.origin[0] * inv, self.origin[1] * inv];
        out.r_inner = self.r_inner * inv;
        out.r_outer = self.r_outer * inv;
        for v in out.values.iter_mut() {
            *v *= inv;
        }
        out.source = None;
        out
    }
}

/// Value, gradient and Hessian of a local interpolant.
#[derive(Debug, Clone, Copy)]
pub struct InterpJet<S: Real> {
    pub value: S,
    pub grad: [S; 2],
    pub hess: [S; 3],
}

/// Measured decay constants per derivative order.
#[derive(Debug, Clone, Copy)]
pub struct DecayConstants<S: Real> {
    /// `c_j` for `j = 0, 1, 2`.
    pub per_order: [S; 3],
    pub max: S,
}

/// Cubic Lagrange basis on nodes {0,1,2,3} evaluated at `s`, with first and
/// second derivatives (in node units).
fn lagrange4<S: Real>(s: S) -> ([S; 4], [S; 4], [S; 4]) {
    let nodes = [S::zero(), S::one(), S::two(), S::lit(3.0)];
    let mut l = [S::zero(); 4];
    let mut dl = [S::zero(); 4];
    let mut ddl = [S::zero(); 4];
    for i in 0..4 {
        let mut denom = S::one();
        for j in 0..4 {
            if j != i {
                denom *= nodes[i] - nodes[j];
            }
        }
        let others: Vec<S> = (0..4).filter(|&j| j != i).map(|j| nodes[j]).collect();
        let (a, b, c) = (others[0], others[1], others[2]);
        // p(s) = (s-a)(s-b)(s-c)
        let val = (s - a) * (s - b) * (s - c);
        let d = (s - b) * (s - c) + (s - a) * (s - c) + (s - a) * (s - b);
        let dd = S::two() * ((s - a) + (s - b) + (s - c));
        l[i] = val / denom;
        dl[i] = d / denom;
        ddl[i] = dd / denom;
    }
    (l, dl, ddl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn linear_graph(h: f64) -> GraphFunction<f64> {
        GraphFunction::sample(
            2.0,
            6.0,
            h,
            1,
            Arc::new(|x, y| vec![0.3 * x - 0.1 * y]),
        )
        .unwrap()
    }

    #[test]
    fn derivatives_of_linear_are_exact() {
        let g = linear_graph(0.5);
        for node in g.active_nodes() {
            let d = g.du(node, 0);
            assert_relative_eq!(d[0], 0.3, epsilon = 1e-13);
            assert_relative_eq!(d[1], -0.1, epsilon = 1e-13);
            let dd = g.d2u(node, 0);
            assert!(dd.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn residual_vanishes_on_linear_graph() {
        let g = linear_graph(0.5);
        let (_, sup) = g.residual_field().unwrap();
        assert!(sup < 1e-12, "sup residual {sup}");
    }

    #[test]
    fn quadratic_derivatives_are_exact_at_interior() {
        let g = GraphFunction::sample(
            2.0,
            6.0,
            0.5,
            1,
            Arc::new(|x, y| vec![x * x + 0.5 * x * y - y * y]),
        )
        .unwrap();
        for node in g.active_nodes() {
            let [x, y] = g.node_position(node);
            let d = g.du(node, 0);
            // one-sided first-derivative stencils are exact on quadratics too
            assert_relative_eq!(d[0], 2.0 * x + 0.5 * y, epsilon = 1e-10);
            assert_relative_eq!(d[1], 0.5 * x - 2.0 * y, epsilon = 1e-10);
            let dd = g.d2u(node, 0);
            assert_relative_eq!(dd[0], 2.0, epsilon = 1e-9);
            assert_relative_eq!(dd[1], 0.5, epsilon = 1e-9);
            assert_relative_eq!(dd[2], -2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let g = GraphFunction::sample(
            2.0,
            6.0,
            0.25,
            1,
            Arc::new(|x, y| vec![x * x * x - 2.0 * x * y + y * y]),
        )
        .unwrap();
        let (x, y) = (3.1, 2.4);
        let jet = g.interpolate(x, y, 0).unwrap();
        assert_relative_eq!(jet.value, x * x * x - 2.0 * x * y + y * y, epsilon = 1e-9);
        assert_relative_eq!(jet.grad[0], 3.0 * x * x - 2.0 * y, epsilon = 1e-7);
        assert_relative_eq!(jet.hess[0], 6.0 * x, epsilon = 1e-6);
        assert_relative_eq!(jet.hess[1], -2.0, epsilon = 1e-6);
        assert_relative_eq!(jet.hess[2], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn decay_constants_linear_case() {
        let g = GraphFunction::sample(1.0, 8.0, 0.25, 1, Arc::new(|x, _| vec![0.2 * x])).unwrap();
        let d = g.decay_constants();
        assert_relative_eq!(d.per_order[1], 0.2, epsilon = 1e-12);
        assert!(d.per_order[0] <= 0.2 + 1e-12);
        assert!(d.per_order[2] < 1e-9);
        assert_relative_eq!(d.max, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn rescaling_scales_grid_and_values() {
        let g = linear_graph(0.5);
        let r = g.rescaled(2.0);
        assert_relative_eq!(r.spacing(), 0.25, epsilon = 1e-15);
        let (ri, ro) = r.radii();
        assert_relative_eq!(ri, 1.0, epsilon = 1e-15);
        assert_relative_eq!(ro, 3.0, epsilon = 1e-15);
        // u_t(x) = u(t x)/t keeps a linear graph linear with the same slope
        for node in r.active_nodes() {
            let [x, y] = r.node_position(node);
            assert_relative_eq!(r.value(node, 0), 0.3 * x - 0.1 * y, epsilon = 1e-12);
        }
    }
}
