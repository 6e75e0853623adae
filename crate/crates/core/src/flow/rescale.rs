use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{FlowTrace, ImmersedCurve};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub x: [f64; 2],
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledState {
    pub tau: f64,
    /// M_tau; its `t` field keeps the original time.
    pub curve: ImmersedCurve,
    /// Estimated interpolation error in rescaled coordinates (0 on stored states).
    pub interpolation_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledTrace {
    pub center: SpacetimePoint,
    pub states: Vec<RescaledState>,
}

impl RescaledTrace {
    pub fn taus(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.tau).collect()
    }

    /// Index of the state whose tau is closest to `tau`.
    pub fn nearest(&self, tau: f64) -> Option<usize> {
        (0..self.states.len()).min_by(|&a, &b| {
            (self.states[a].tau - tau).abs().total_cmp(&(self.states[b].tau - tau).abs())
        })
    }
}

fn interpolate(a: &ImmersedCurve, b: &ImmersedCurve, w: f64, t: f64) -> Result<ImmersedCurve> {
    let mut out = a.clone();
    if a.components.len() != b.components.len() {
        return Err(LabError::Unsupported("interpolation across a change of topology".into()));
    }
    for (c, d) in out.components.iter_mut().zip(&b.components) {
        if c.len() != d.len() {
            return Err(LabError::Unsupported("interpolation across a change of vertex count".into()));
        }
        for (p, q) in c.points.iter_mut().zip(&d.points) {
            *p = [(1.0 - w) * p[0] + w * q[0], (1.0 - w) * p[1] + w * q[1]];
        }
        if let (Some(f), Some(g)) = (c.f.as_mut(), d.f.as_ref()) {
            for (u, v) in f.iter_mut().zip(g) {
                *u = (1.0 - w) * *u + w * v;
            }
        }
        let anchor = (1.0 - w) * c.theta[0] + w * d.theta[0];
        c.theta = c.tangent_angles(Some(anchor));
    }
    out.t = t;
    Ok(out)
}

fn second_difference(states: &[ImmersedCurve], k: usize) -> f64 {
    if states.len() < 3 {
        return 0.0;
    }
    let k = k.clamp(1, states.len() - 2);
    let (a, b, c) = (&states[k - 1], &states[k], &states[k + 1]);
    let mut worst: f64 = 0.0;
    for ((ca, cb), cc) in a.components.iter().zip(&b.components).zip(&c.components) {
        if ca.len() != cb.len() || cb.len() != cc.len() {
            return f64::INFINITY;
        }
        for ((p, q), r) in ca.points.iter().zip(&cb.points).zip(&cc.points) {
            worst = worst.max((p[0] - 2.0 * q[0] + r[0]).hypot(p[1] - 2.0 * q[1] + r[1]));
        }
    }
    worst
}

/// M_tau = e^{tau/2} (L_{t0 - e^{-tau}} - x0), on the stored states with
/// t < t0 or on a prescribed tau grid by linear interpolation in t.
pub fn rescale_flow(trace: &FlowTrace, center: SpacetimePoint, taus: Option<&[f64]>) -> Result<RescaledTrace> {
    let before: Vec<&ImmersedCurve> = trace.states.iter().filter(|s| s.t < center.t).collect();
    if before.is_empty() {
        return Err(LabError::TimeRange(format!("no state before t0 = {}", center.t)));
    }
    let map = |c: &ImmersedCurve, tau: f64| c.transformed(center.x, (0.5 * tau).exp());
    let states = match taus {
        None => before
            .iter()
            .map(|c| {
                let tau = -(center.t - c.t).ln();
                RescaledState {
                    tau,
                    curve: map(c, tau),
                    interpolation_error: 0.0,
                }
            })
            .collect(),
        Some(grid) => {
            let (t_lo, t_hi) = (before[0].t, before[before.len() - 1].t);
            let owned: Vec<ImmersedCurve> = before.iter().map(|c| (*c).clone()).collect();
            let mut out = Vec::with_capacity(grid.len());
            for &tau in grid {
                let t = center.t - (-tau).exp();
                if !(t >= t_lo - 1e-14 && t <= t_hi + 1e-14) {
                    return Err(LabError::TimeRange(format!(
                        "tau = {tau} needs t = {t}, outside [{t_lo}, {t_hi}]"
                    )));
                }
                let k = owned.partition_point(|s| s.t <= t).saturating_sub(1).min(owned.len() - 1);
                let (curve, err) = if (owned[k].t - t).abs() <= 1e-14 || k + 1 == owned.len() {
                    (owned[k].clone(), 0.0)
                } else {
                    let w = (t - owned[k].t) / (owned[k + 1].t - owned[k].t);
                    let c = interpolate(&owned[k], &owned[k + 1], w, t)?;
                    (c, 0.5 * w * (1.0 - w) * second_difference(&owned, k + 1))
                };
                out.push(RescaledState {
                    tau,
                    curve: map(&curve, tau),
                    interpolation_error: err * (0.5 * tau).exp(),
                });
            }
            out
        }
    };
    Ok(RescaledTrace { center, states })
}

/// Inverse of `rescale_flow`: L_t = x0 + e^{-tau/2} M_tau at t = t0 - e^{-tau}.
pub fn unrescale(r: &RescaledTrace) -> FlowTrace {
    let x0 = r.center.x;
    let states = r
        .states
        .iter()
        .map(|s| {
            let k = (0.5 * s.tau).exp();
            let mut c = s.curve.transformed([-k * x0[0], -k * x0[1]], 1.0 / k);
            c.t = r.center.t - (-s.tau).exp();
            c
        })
        .collect();
    FlowTrace {
        scheme: "unrescaled".into(),
        dt: f64::NAN,
        states,
        singular: None,
        channels: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{csf_evolve, fixtures, CsfOptions};

    #[test]
    fn static_cone_is_scale_invariant() {
        let c = fixtures::line_union(&[0.0, 1.0], 5.0, 0.1).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(1e-2, 5)).unwrap();
        let r = rescale_flow(&tr, SpacetimePoint { x: [0.0, 0.0], t: 1.0 }, None).unwrap();
        let lines = [crate::geom::Line::through_origin(0.0), crate::geom::Line::through_origin(1.0)];
        for s in &r.states {
            for comp in &s.curve.components {
                for p in &comp.points {
                    let d = lines.iter().map(|l| l.distance(*p)).fold(f64::INFINITY, f64::min);
                    assert!(d < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shrinking_circle_becomes_static_shrinker() {
        let c = fixtures::circle(1.0, 512).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(1e-5, 4000)).unwrap();
        let r = rescale_flow(&tr, SpacetimePoint { x: [0.0, 0.0], t: 0.5 }, None).unwrap();
        for s in r.states.iter().step_by(500) {
            for p in &s.curve.components[0].points {
                assert!((p[0].hypot(p[1]) - 2f64.sqrt()).abs() < 2e-3);
            }
        }
    }

    #[test]
    fn round_trip_and_range_error() {
        let c = fixtures::circle(1.0, 128).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(1e-3, 100)).unwrap();
        let center = SpacetimePoint { x: [0.1, -0.2], t: 0.5 };
        let r = rescale_flow(&tr, center, None).unwrap();
        let back = unrescale(&r);
        for (a, b) in tr.states.iter().zip(&back.states) {
            assert!((a.t - b.t).abs() < 1e-14);
            for (p, q) in a.components[0].points.iter().zip(&b.components[0].points) {
                assert!((p[0] - q[0]).abs() < 1e-13 && (p[1] - q[1]).abs() < 1e-13);
            }
        }
        let grid = [0.7, 0.75];
        let r = rescale_flow(&tr, center, Some(&grid)).unwrap();
        assert!(r.states.iter().all(|s| s.interpolation_error < 1e-5));
        assert!(matches!(rescale_flow(&tr, center, Some(&[5.0])), Err(LabError::TimeRange(_))));
    }
}
