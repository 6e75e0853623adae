use serde::{Deserialize, Serialize};

use super::{ImmersedCurve, RescaledTrace};
use crate::cone::PlaneUnionCone;
use crate::error::{LabError, Result};
use crate::geom::{c_graph_fit, GaussianArea, Line, Region};

/// Truncation budget for the densities scanned here.
const WINDOW_TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowTime {
    At(f64),
    ExceedsHorizon,
}

impl WindowTime {
    /// Numeric value with the horizon standing in for "exceeds horizon".
    pub fn or_horizon(self, horizon: f64) -> f64 {
        match self {
            WindowTime::At(t) => t,
            WindowTime::ExceedsHorizon => horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeWindowReport {
    pub eps: f64,
    pub delta: f64,
    pub kappa1: f64,
    /// Scanned tau range, measured from the first state.
    pub horizon: f64,
    pub t1: WindowTime,
    pub t_theta: WindowTime,
    /// (center, r0) pairs.
    pub r0: Vec<([f64; 2], f64)>,
    /// |tau - ln 2| of the state used for the time -1/2 slice.
    pub slice_offset: f64,
}

/// Lines and gradings of a cone in C.
pub(crate) fn cone_lines(w: &PlaneUnionCone) -> Result<Vec<(Line, f64)>> {
    if w.n != 1 {
        return Err(LabError::Unsupported(format!("curve testbed needs a cone in C, got n = {}", w.n)));
    }
    Ok(w.components
        .iter()
        .map(|c| (Line::through_origin(c.frame[0][0].arg()), c.grading))
        .collect())
}

fn sampled_radius(c: &ImmersedCurve) -> f64 {
    c.components
        .iter()
        .filter(|k| !k.closed)
        .flat_map(|k| [k.points[0], k.points[k.len() - 1]])
        .map(|p| p[0].hypot(p[1]))
        .fold(f64::INFINITY, f64::min)
}

/// inf of R in (0, 1) with Theta(r^{-1}(L - x)) > theta_w0 - kappa1 for every
/// grid radius r in (R, 1); 0 when no grid radius fails, 1 when the largest does.
pub fn conicality_radius(slice: &ImmersedCurve, x: [f64; 2], theta_w0: f64, kappa1: f64, radii: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let top = radii.iter().cloned().fold(0.0, f64::max);
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(LabError::Parameter(format!("radius grid must lie in (0, 1), got {r}")));
        }
        let th = slice.gaussian_area_with_tol(&x, r, WINDOW_TAIL_TOL)?;
        if th <= theta_w0 - kappa1 {
            worst = worst.max(if r == top { 1.0 } else { r });
        }
    }
    Ok(worst)
}

/// Geometric radius grid on [r_min, 1).
pub fn radius_grid(r_min: f64, count: usize) -> Vec<f64> {
    let lo = r_min.ln();
    (0..count).map(|i| (lo * (1.0 - i as f64 / count as f64)).exp()).collect()
}

/// T1(eps), T_Theta(delta) and r0 on a rescaled trace.
pub fn cone_windows(
    r: &RescaledTrace,
    w0: &PlaneUnionCone,
    eps: f64,
    delta: f64,
    kappa1: f64,
    centers: &[[f64; 2]],
) -> Result<ConeWindowReport> {
    if !(eps > 0.0 && eps < 1.0) || !(delta > 0.0) {
        return Err(LabError::Parameter("need 0 < eps < 1 and delta > 0".into()));
    }
    if r.states.is_empty() {
        return Err(LabError::Empty("rescaled trace has no states".into()));
    }
    let lines: Vec<Line> = cone_lines(w0)?.into_iter().map(|(l, _)| l).collect();
    let theta_w0 = w0.len() as f64;
    let tau_start = r.states[0].tau;
    let horizon = r.states[r.states.len() - 1].tau - tau_start;
    let annulus = Region::Annulus {
        center: [0.0, 0.0],
        inner: eps,
        outer: 1.0 / eps,
    };
    let mut t1 = WindowTime::ExceedsHorizon;
    let mut t_theta = WindowTime::ExceedsHorizon;
    for s in &r.states {
        let rel = s.tau - tau_start;
        if t1 == WindowTime::ExceedsHorizon {
            let reach = sampled_radius(&s.curve);
            if reach < 1.0 / eps {
                return Err(LabError::Parameter(format!(
                    "annulus outer radius {:.3} outside sampled region {reach:.3}",
                    1.0 / eps
                )));
            }
            let comps: Vec<&[[f64; 2]]> = s.curve.components.iter().map(|c| c.points.as_slice()).collect();
            let g = c_graph_fit(&comps, &lines, &annulus, 1);
            if !g.is_graph || g.c > eps * eps {
                t1 = WindowTime::At(rel);
            }
        }
        if t_theta == WindowTime::ExceedsHorizon {
            let th = s.curve.gaussian_area_with_tol(&[0.0, 0.0], 1.0, WINDOW_TAIL_TOL)?;
            if th <= theta_w0 - delta {
                t_theta = WindowTime::At(rel);
            }
        }
    }
    let target = std::f64::consts::LN_2;
    let k = r.nearest(target).expect("non-empty");
    let s = &r.states[k];
    let slice = s.curve.transformed([0.0, 0.0], (-0.5 * s.tau).exp());
    let radii = radius_grid(1e-3, 240);
    let r0 = centers
        .iter()
        .map(|&x| conicality_radius(&slice, x, theta_w0, kappa1, &radii).map(|v| (x, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConeWindowReport {
        eps,
        delta,
        kappa1,
        horizon,
        t1,
        t_theta,
        r0,
        slice_offset: (s.tau - target).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{csf_evolve, fixtures, rescale_flow, CsfOptions, SpacetimePoint};

    #[test]
    fn static_cone_windows_exceed_horizon() {
        let c = fixtures::line_union(&[0.0, 1.2], 60.0, 0.05).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(0.05, 12)).unwrap();
        let r = rescale_flow(&tr, SpacetimePoint { x: [0.0, 0.0], t: 1.0 }, None).unwrap();
        let w = PlaneUnionCone::from_phases(&[vec![0.0], vec![1.2]]).unwrap();
        let rep = cone_windows(&r, &w, 0.1, 0.05, 0.1, &[[0.0, 0.0]]).unwrap();
        assert_eq!(rep.t1, WindowTime::ExceedsHorizon);
        assert_eq!(rep.t_theta, WindowTime::ExceedsHorizon);
        assert_eq!(rep.r0[0].1, 0.0);
    }

    #[test]
    fn annulus_beyond_samples_is_rejected() {
        let c = fixtures::line_union(&[0.0, 1.2], 5.0, 0.05).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(0.05, 2)).unwrap();
        let r = rescale_flow(&tr, SpacetimePoint { x: [0.0, 0.0], t: 1.0 }, None).unwrap();
        let w = PlaneUnionCone::from_phases(&[vec![0.0], vec![1.2]]).unwrap();
        assert!(cone_windows(&r, &w, 0.1, 0.05, 0.1, &[]).is_err());
    }
}
