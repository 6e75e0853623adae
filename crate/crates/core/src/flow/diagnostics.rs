use serde::{Deserialize, Serialize};

use super::{CurveComponent, FlowTrace, ImmersedCurve};
use crate::error::{LabError, Result};
use crate::geom::{segment_gaussian, GaussianArea};

/// Discrete curvature vector, unit normal and dual length at each vertex.
/// Open endpoints carry zero curvature.
pub fn curvature_vectors(c: &CurveComponent) -> Vec<([f64; 2], [f64; 2], f64)> {
    let m = c.len();
    let p = &c.points;
    let unit = |a: [f64; 2], b: [f64; 2]| -> ([f64; 2], f64) {
        let d = [b[0] - a[0], b[1] - a[1]];
        let l = d[0].hypot(d[1]);
        ([d[0] / l, d[1] / l], l)
    };
    (0..m)
        .map(|i| {
            let prev = if c.closed || i > 0 { Some((i + m - 1) % m) } else { None };
            let next = if c.closed || i + 1 < m { Some((i + 1) % m) } else { None };
            match (prev, next) {
                (Some(a), Some(b)) => {
                    let (t0, l0) = unit(p[a], p[i]);
                    let (t1, l1) = unit(p[i], p[b]);
                    let dual = 0.5 * (l0 + l1);
                    let h = [(t1[0] - t0[0]) / dual, (t1[1] - t0[1]) / dual];
                    let (tm, _) = unit([0.0, 0.0], [t0[0] + t1[0], t0[1] + t1[1]]);
                    (h, [-tm[1], tm[0]], dual)
                }
                (None, Some(b)) => {
                    let (t, l) = unit(p[i], p[b]);
                    ([0.0, 0.0], [-t[1], t[0]], 0.5 * l)
                }
                (Some(a), None) => {
                    let (t, l) = unit(p[a], p[i]);
                    ([0.0, 0.0], [-t[1], t[0]], 0.5 * l)
                }
                (None, None) => ([0.0, 0.0], [0.0, 1.0], 0.0),
            }
        })
        .collect()
}

fn backward_time(curve: &ImmersedCurve, t0: f64) -> Result<f64> {
    let tau = t0 - curve.t;
    if !(tau > 0.0) {
        return Err(LabError::TimeRange(format!(
            "state at t = {} is not before t0 = {t0}",
            curve.t
        )));
    }
    Ok(tau)
}

/// int rho_{x0,t0} ds on one state, i.e. Theta(L_t, x0, sqrt(t0 - t)).
pub fn gaussian_density(curve: &ImmersedCurve, x0: [f64; 2], t0: f64, tol: f64) -> Result<f64> {
    let tau = backward_time(curve, t0)?;
    curve.gaussian_area_with_tol(&x0, tau.sqrt(), tol)
}

/// int |theta - theta0|^2 rho ds with theta the piecewise constant edge angle.
pub fn theta_functional(curve: &ImmersedCurve, x0: [f64; 2], t0: f64, theta0: f64) -> Result<f64> {
    let tau = backward_time(curve, t0)?;
    let s = tau.sqrt();
    let norm = (4.0 * std::f64::consts::PI).sqrt().recip();
    let mut total = 0.0;
    for c in &curve.components {
        let th = c.edge_angles();
        let m = c.len();
        for (i, t) in th.iter().enumerate() {
            let (p, q) = (c.points[i], c.points[(i + 1) % m]);
            let a = [(p[0] - x0[0]) / s, (p[1] - x0[1]) / s];
            let b = [(q[0] - x0[0]) / s, (q[1] - x0[1]) / s];
            total += (t - theta0).powi(2) * segment_gaussian(&a, &b);
        }
    }
    Ok(norm * total)
}

/// (int |H + (x - x0)^perp / (2 tau)|^2 rho, int 2 |H|^2 rho) by vertex quadrature.
pub fn huisken_integrand(curve: &ImmersedCurve, x0: [f64; 2], t0: f64) -> Result<(f64, f64)> {
    let tau = backward_time(curve, t0)?;
    let norm = (4.0 * std::f64::consts::PI * tau).sqrt().recip();
    let mut shrinker = 0.0;
    let mut dissipation = 0.0;
    for c in &curve.components {
        for (p, (h, nrm, dual)) in c.points.iter().zip(curvature_vectors(c)) {
            let d = [p[0] - x0[0], p[1] - x0[1]];
            let rho = norm * (-(d[0] * d[0] + d[1] * d[1]) / (4.0 * tau)).exp();
            let dn = (d[0] * nrm[0] + d[1] * nrm[1]) / (2.0 * tau);
            let v = [h[0] + dn * nrm[0], h[1] + dn * nrm[1]];
            shrinker += (v[0] * v[0] + v[1] * v[1]) * rho * dual;
            dissipation += 2.0 * (h[0] * h[0] + h[1] * h[1]) * rho * dual;
        }
    }
    Ok((shrinker, dissipation))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityAudit {
    pub x0: [f64; 2],
    pub t0: f64,
    pub theta0: f64,
    pub times: Vec<f64>,
    pub density: Vec<f64>,
    pub huisken_rhs: Vec<f64>,
    pub theta_functional: Vec<f64>,
    pub theta_dissipation: Vec<f64>,
    /// Largest increase of the density between consecutive states.
    pub density_max_increase: f64,
    /// Largest increase of the theta functional between consecutive states.
    pub theta_max_increase: f64,
    /// Per interval: density drop minus the trapezoidal integral of the rhs.
    pub interval_residual: Vec<f64>,
    /// sup over k of |cumulative residual up to state k|.
    pub huisken_residual: f64,
    /// Largest shortfall of the theta drop below the integrated dissipation.
    pub theta_shortfall: f64,
}

/// Huisken and theta monotonicity along a trace, for the backward kernel at (x0, t0).
pub fn monotonicity_audit(trace: &FlowTrace, x0: [f64; 2], t0: f64, theta0: f64, tol: f64) -> Result<MonotonicityAudit> {
    if trace.states.is_empty() {
        return Err(LabError::Empty("trace has no states".into()));
    }
    let mut a = MonotonicityAudit {
        x0,
        t0,
        theta0,
        times: Vec::new(),
        density: Vec::new(),
        huisken_rhs: Vec::new(),
        theta_functional: Vec::new(),
        theta_dissipation: Vec::new(),
        density_max_increase: 0.0,
        theta_max_increase: 0.0,
        interval_residual: Vec::new(),
        huisken_residual: 0.0,
        theta_shortfall: 0.0,
    };
    for s in &trace.states {
        a.times.push(s.t);
        a.density.push(gaussian_density(s, x0, t0, tol)?);
        let (h, d) = huisken_integrand(s, x0, t0)?;
        a.huisken_rhs.push(h);
        a.theta_dissipation.push(d);
        a.theta_functional.push(theta_functional(s, x0, t0, theta0)?);
    }
    let mut cumulative = 0.0f64;
    for k in 1..a.times.len() {
        let dt = a.times[k] - a.times[k - 1];
        let drop = a.density[k - 1] - a.density[k];
        let r = drop - 0.5 * dt * (a.huisken_rhs[k - 1] + a.huisken_rhs[k]);
        a.interval_residual.push(r);
        cumulative += r;
        a.huisken_residual = a.huisken_residual.max(cumulative.abs());
        a.density_max_increase = a.density_max_increase.max(-drop);
        let tdrop = a.theta_functional[k - 1] - a.theta_functional[k];
        a.theta_max_increase = a.theta_max_increase.max(-tdrop);
        let diss = 0.5 * dt * (a.theta_dissipation[k - 1] + a.theta_dissipation[k]);
        a.theta_shortfall = a.theta_shortfall.max(diss - tdrop);
    }
    Ok(a)
}
