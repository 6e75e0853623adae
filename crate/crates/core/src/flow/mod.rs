//! Curve shortening flow in C (Lagrangian mean curvature flow for n = 1),
//! its rescaled flow, and Gaussian-density diagnostics.

mod diagnostics;
pub mod fixtures;
mod functionals;
mod rescale;
mod windows;

pub use diagnostics::{
    curvature_vectors, gaussian_density, huisken_integrand, monotonicity_audit, theta_functional,
    MonotonicityAudit,
};
pub use functionals::{
    distance_functionals, distance_functionals_at, excess_monotonicity_audit, match_components,
    ConeMatching, DistanceCase, DistanceReport, ExcessAudit, GRADING_WINDOW,
};
pub use rescale::{rescale_flow, unrescale, RescaledState, RescaledTrace, SpacetimePoint};
pub use windows::{cone_windows, conicality_radius, radius_grid, ConeWindowReport, WindowTime};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geom::{polyline_gaussian_integral, GaussianArea};
use crate::numerics::fd;
use crate::numerics::linalg::{solve_cyclic_tridiagonal, solve_tridiagonal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComponent {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
    /// Tangent angle at each vertex on a continuous branch.
    pub theta: Vec<f64>,
    /// Optional potential with df = (x dy - y dx)/2 along the curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
}

impl CurveComponent {
    pub fn new(points: Vec<[f64; 2]>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if points.len() < min {
            return Err(LabError::Parameter(format!("curve component needs >= {min} vertices")));
        }
        let m = points.len();
        let pairs = if closed { m } else { m - 1 };
        for i in 0..pairs {
            let (a, b) = (points[i], points[(i + 1) % m]);
            if a == b {
                return Err(LabError::Parameter(format!("repeated vertex at index {i}")));
            }
            if !(a[0].is_finite() && a[1].is_finite()) {
                return Err(LabError::Parameter("non-finite vertex".into()));
            }
        }
        let mut c = Self {
            points,
            closed,
            theta: Vec::new(),
            f: None,
        };
        c.theta = c.tangent_angles(None);
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn neighbours(&self, i: usize) -> (usize, usize) {
        let m = self.len();
        if self.closed {
            ((i + m - 1) % m, (i + 1) % m)
        } else {
            (i.saturating_sub(1), (i + 1).min(m - 1))
        }
    }

    /// Vertex tangent angles continued along the curve, anchored near `anchor`.
    pub fn tangent_angles(&self, anchor: Option<f64>) -> Vec<f64> {
        let m = self.len();
        let mut th: Vec<f64> = (0..m)
            .map(|i| {
                let (a, b) = self.neighbours(i);
                let (p, q) = (self.points[a], self.points[b]);
                (q[1] - p[1]).atan2(q[0] - p[0])
            })
            .collect();
        fd::unwrap(&mut th);
        if let Some(a) = anchor {
            let shift = fd::nearest_branch(th[0], a) - th[0];
            th.iter_mut().for_each(|t| *t += shift);
        }
        th
    }

    /// Edge angles on a continuous branch anchored to the vertex angles.
    pub fn edge_angles(&self) -> Vec<f64> {
        let m = self.len();
        let edges = if self.closed { m } else { m - 1 };
        let mut th: Vec<f64> = (0..edges)
            .map(|i| {
                let (p, q) = (self.points[i], self.points[(i + 1) % m]);
                (q[1] - p[1]).atan2(q[0] - p[0])
            })
            .collect();
        fd::unwrap(&mut th);
        if let Some(&t0) = self.theta.first() {
            let shift = fd::nearest_branch(th[0], t0) - th[0];
            th.iter_mut().for_each(|t| *t += shift);
        }
        th
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        let m = self.len();
        let edges = if self.closed { m } else { m - 1 };
        (0..edges)
            .map(|i| {
                let (p, q) = (self.points[i], self.points[(i + 1) % m]);
                (q[0] - p[0]).hypot(q[1] - p[1])
            })
            .collect()
    }

    /// Potential by exact chord integration of (x dy - y dx)/2, starting at `f0`.
    pub fn potential(&self, f0: f64) -> Vec<f64> {
        let mut f = Vec::with_capacity(self.len());
        let mut acc = f0;
        f.push(acc);
        for w in self.points.windows(2) {
            acc += 0.5 * (w[0][0] * w[1][1] - w[0][1] * w[1][0]);
            f.push(acc);
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImmersedCurve {
    pub components: Vec<CurveComponent>,
    pub t: f64,
}

impl ImmersedCurve {
    pub fn new(components: Vec<CurveComponent>, t: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(LabError::Empty("curve has no components".into()));
        }
        Ok(Self { components, t })
    }

    pub fn with_potential(mut self) -> Self {
        for c in self.components.iter_mut() {
            c.f = Some(c.potential(0.0));
        }
        self
    }

    /// Apply p -> s (p - x0), keeping angles.
    pub fn transformed(&self, x0: [f64; 2], s: f64) -> Self {
        let mut out = self.clone();
        for c in out.components.iter_mut() {
            if let Some(f) = c.f.as_mut() {
                // lambda pulls back to s^2 (lambda - (x0_x dy - x0_y dx)/2)
                for (v, p) in f.iter_mut().zip(&c.points) {
                    *v = s * s * (*v - 0.5 * (x0[0] * p[1] - x0[1] * p[0]));
                }
            }
            for p in c.points.iter_mut() {
                *p = [s * (p[0] - x0[0]), s * (p[1] - x0[1])];
            }
        }
        out
    }

    pub fn max_radius(&self, x0: [f64; 2]) -> f64 {
        self.components
            .iter()
            .flat_map(|c| c.points.iter())
            .map(|p| (p[0] - x0[0]).hypot(p[1] - x0[1]))
            .fold(0.0, f64::max)
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }
}

impl GaussianArea for ImmersedCurve {
    fn dimension(&self) -> usize {
        1
    }

    fn gaussian_area_with_tol(&self, x0: &[f64], r: f64, tol: f64) -> Result<f64> {
        let norm = (4.0 * std::f64::consts::PI).sqrt().recip();
        let mut total = 0.0;
        let mut tail = 0.0;
        for c in &self.components {
            let (v, t) = polyline_gaussian_integral(&c.points, c.closed, x0, r);
            total += v;
            tail += t;
        }
        if norm * tail > tol {
            return Err(LabError::Truncation {
                estimate: norm * tail,
                tolerance: tol,
            });
        }
        Ok(norm * total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsfOptions {
    pub dt: f64,
    pub steps: usize,
    /// Store every k-th state (the final state is always stored).
    pub record_every: usize,
    /// Terminate when curvature times local spacing exceeds this.
    pub turning_threshold: f64,
    /// Terminate when the curvature exceeds this.
    pub kappa_max: f64,
    /// Steps between self-intersection checks.
    pub touch_every: usize,
}

impl CsfOptions {
    pub fn new(dt: f64, steps: usize) -> Self {
        Self {
            dt,
            steps,
            record_every: 1,
            turning_threshold: 0.5,
            kappa_max: 1e6,
            touch_every: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularEvent {
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub scheme: String,
    pub dt: f64,
    pub states: Vec<ImmersedCurve>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub singular: Option<SingularEvent>,
    /// Diagnostic channels aligned with `states`.
    #[serde(default)]
    pub channels: BTreeMap<String, Vec<f64>>,
}

impl FlowTrace {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn add_channel(&mut self, name: &str, values: Vec<f64>) -> Result<()> {
        if values.len() != self.states.len() {
            return Err(LabError::Parameter(format!(
                "channel {name} has {} values for {} states",
                values.len(),
                self.states.len()
            )));
        }
        self.channels.insert(name.to_string(), values);
        Ok(())
    }
}

pub const SCHEME: &str = "deturck-semi-implicit";

/// One semi-implicit step X - dt / q (X_{i+1} - 2 X_i + X_{i-1}) = X_old with
/// q_i the mean squared length of the two edges at i (open ends fixed).
fn step_component(c: &CurveComponent, dt: f64) -> Vec<[f64; 2]> {
    let m = c.len();
    let p = &c.points;
    let sq = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    if c.closed {
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for i in 0..m {
            let (a, b) = ((i + m - 1) % m, (i + 1) % m);
            let q = 0.5 * (sq(p[a], p[i]) + sq(p[i], p[b]));
            let k = dt / q;
            lower[i] = -k;
            upper[i] = -k;
            diag[i] = 1.0 + 2.0 * k;
        }
        let mut xs: Vec<f64> = p.iter().map(|v| v[0]).collect();
        let mut ys: Vec<f64> = p.iter().map(|v| v[1]).collect();
        solve_cyclic_tridiagonal(&lower, &diag, &upper, &mut xs);
        solve_cyclic_tridiagonal(&lower, &diag, &upper, &mut ys);
        xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect()
    } else {
        if m < 3 {
            return p.clone();
        }
        let k_int = m - 2;
        let mut lower = vec![0.0; k_int];
        let mut diag = vec![0.0; k_int];
        let mut upper = vec![0.0; k_int];
        let mut xs = vec![0.0; k_int];
        let mut ys = vec![0.0; k_int];
        for j in 0..k_int {
            let i = j + 1;
            let q = 0.5 * (sq(p[i - 1], p[i]) + sq(p[i], p[i + 1]));
            let k = dt / q;
            lower[j] = -k;
            upper[j] = -k;
            diag[j] = 1.0 + 2.0 * k;
            xs[j] = p[i][0];
            ys[j] = p[i][1];
            if i == 1 {
                xs[j] += k * p[0][0];
                ys[j] += k * p[0][1];
            }
            if i == m - 2 {
                xs[j] += k * p[m - 1][0];
                ys[j] += k * p[m - 1][1];
            }
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut xs);
        solve_tridiagonal(&lower, &diag, &upper, &mut ys);
        let mut out = Vec::with_capacity(m);
        out.push(p[0]);
        out.extend(xs.into_iter().zip(ys).map(|(x, y)| [x, y]));
        out.push(p[m - 1]);
        out
    }
}

/// Largest turning angle and largest curvature over all vertices.
fn resolution_metrics(curve: &ImmersedCurve) -> (f64, f64) {
    let mut turn: f64 = 0.0;
    let mut kappa: f64 = 0.0;
    for c in &curve.components {
        let m = c.len();
        let range: Box<dyn Iterator<Item = usize>> = if c.closed { Box::new(0..m) } else { Box::new(1..m.saturating_sub(1)) };
        for i in range {
            let (a, b) = ((i + m - 1) % m, (i + 1) % m);
            let (p, q, r) = (c.points[a], c.points[i], c.points[b]);
            let e1 = [q[0] - p[0], q[1] - p[1]];
            let e2 = [r[0] - q[0], r[1] - q[1]];
            let ang = (e1[0] * e2[1] - e1[1] * e2[0]).atan2(e1[0] * e2[0] + e1[1] * e2[1]).abs();
            let dual = 0.5 * (e1[0].hypot(e1[1]) + e2[0].hypot(e2[1]));
            turn = turn.max(ang);
            kappa = kappa.max(ang / dual);
        }
    }
    (turn, kappa)
}

fn segments_close(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2], tol: f64) -> bool {
    let point_seg = |p: [f64; 2], s: [f64; 2], e: [f64; 2]| -> f64 {
        let (dx, dy) = (e[0] - s[0], e[1] - s[1]);
        let l2 = dx * dx + dy * dy;
        let t = if l2 > 0.0 { (((p[0] - s[0]) * dx + (p[1] - s[1]) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
        (p[0] - s[0] - t * dx).hypot(p[1] - s[1] - t * dy)
    };
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
    let crosses = orient(a, b, c) * orient(a, b, d) < 0.0 && orient(c, d, a) * orient(c, d, b) < 0.0;
    crosses
        || point_seg(a, c, d) < tol
        || point_seg(b, c, d) < tol
        || point_seg(c, a, b) < tol
        || point_seg(d, a, b) < tol
}

/// Bucketed check for non-adjacent edges closer than a fraction of the spacing.
fn self_touch(curve: &ImmersedCurve) -> Option<String> {
    let mut edges: Vec<(usize, usize, [f64; 2], [f64; 2])> = Vec::new();
    let mut hmin = f64::INFINITY;
    let mut hmax: f64 = 0.0;
    for (ci, c) in curve.components.iter().enumerate() {
        let m = c.len();
        let count = if c.closed { m } else { m - 1 };
        for i in 0..count {
            let (p, q) = (c.points[i], c.points[(i + 1) % m]);
            let l = (q[0] - p[0]).hypot(q[1] - p[1]);
            hmin = hmin.min(l);
            hmax = hmax.max(l);
            edges.push((ci, i, p, q));
        }
    }
    let cell = 2.0 * hmax;
    let tol = 0.25 * hmin;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for (k, e) in edges.iter().enumerate() {
        let mid = [(e.2[0] + e.3[0]) / 2.0, (e.2[1] + e.3[1]) / 2.0];
        grid.entry(((mid[0] / cell).floor() as i64, (mid[1] / cell).floor() as i64)).or_default().push(k);
    }
    for (k, e) in edges.iter().enumerate() {
        let mid = [(e.2[0] + e.3[0]) / 2.0, (e.2[1] + e.3[1]) / 2.0];
        let (gx, gy) = ((mid[0] / cell).floor() as i64, (mid[1] / cell).floor() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(list) = grid.get(&(gx + dx, gy + dy)) else { continue };
                for &j in list {
                    if j <= k {
                        continue;
                    }
                    let f = &edges[j];
                    if e.0 == f.0 {
                        let m = curve.components[e.0].len();
                        let gap = (e.1 as i64 - f.1 as i64).unsigned_abs() as usize;
                        let closed = curve.components[e.0].closed;
                        if gap <= 1 || (closed && gap == m - 1) {
                            continue;
                        }
                    }
                    if segments_close(e.2, e.3, f.2, f.3, tol) {
                        return Some(format!(
                            "self-touching below resolution near ({:.4}, {:.4})",
                            e.2[0], e.2[1]
                        ));
                    }
                }
            }
        }
    }
    None
}

/// Evolve by curve shortening flow with the DeTurck-type semi-implicit scheme.
pub fn csf_evolve(curve: &ImmersedCurve, opts: &CsfOptions) -> Result<FlowTrace> {
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(LabError::Parameter("dt must be positive".into()));
    }
    let mut state = curve.clone();
    for c in state.components.iter_mut() {
        let anchor = c.theta.first().copied();
        c.theta = c.tangent_angles(anchor);
    }
    let every = opts.record_every.max(1);
    let mut trace = FlowTrace {
        scheme: SCHEME.into(),
        dt: opts.dt,
        states: vec![state.clone()],
        singular: None,
        channels: BTreeMap::new(),
    };
    for step in 1..=opts.steps {
        let mut next = state.clone();
        for (c, n) in state.components.iter().zip(next.components.iter_mut()) {
            n.points = step_component(c, opts.dt);
            n.theta = n.tangent_angles(c.theta.first().copied());
            if let Some(f) = &c.f {
                n.f = Some(n.potential(f[0]));
            }
        }
        next.t = curve.t + step as f64 * opts.dt;
        let (turn, kappa) = resolution_metrics(&next);
        let mut reason = None;
        if !turn.is_finite() || turn > opts.turning_threshold {
            reason = Some(format!("curvature x spacing {turn:.3} above {}", opts.turning_threshold));
        } else if kappa > opts.kappa_max {
            reason = Some(format!("curvature {kappa:.3e} above {:.3e}", opts.kappa_max));
        } else if opts.touch_every > 0 && step % opts.touch_every == 0 {
            reason = self_touch(&next);
        }
        if let Some(reason) = reason {
            if trace.states.last().map(|s| s.t) != Some(state.t) {
                trace.states.push(state.clone());
            }
            trace.singular = Some(SingularEvent { t: next.t, reason });
            return Ok(trace);
        }
        state = next;
        if step % every == 0 || step == opts.steps {
            trace.states.push(state.clone());
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_is_stationary() {
        let c = fixtures::line(0.3, 5.0, 0.05).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(1e-3, 200)).unwrap();
        let last = tr.states.last().unwrap();
        let dev = c.components[0]
            .points
            .iter()
            .zip(&last.components[0].points)
            .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn circle_radius_follows_ode() {
        let r0 = 1.0;
        let c = fixtures::circle(r0, 256).unwrap();
        let dt = 1e-4;
        let steps = 2000;
        let tr = csf_evolve(&c, &CsfOptions::new(dt, steps)).unwrap();
        let last = tr.states.last().unwrap();
        let r = last.components[0].points.iter().map(|p| p[0].hypot(p[1])).sum::<f64>() / 256.0;
        let exact = (r0 * r0 - 2.0 * last.t).sqrt();
        assert!((r - exact).abs() < 5.0 * dt, "{r} vs {exact}");
    }

    #[test]
    fn shrinking_circle_flags_singular_time() {
        let c = fixtures::circle(0.5, 64).unwrap();
        let mut o = CsfOptions::new(1e-4, 2000);
        o.kappa_max = 50.0;
        let tr = csf_evolve(&c, &o).unwrap();
        let ev = tr.singular.expect("singular");
        assert!(ev.t < 0.13 && ev.t > 0.1, "{ev:?}");
    }
}
