use serde::{Deserialize, Serialize};

use super::diagnostics::curvature_vectors;
use super::windows::cone_lines;
use super::{ImmersedCurve, RescaledState, RescaledTrace, SpacetimePoint};
use crate::cone::PlaneUnionCone;
use crate::error::{LabError, Result};
use crate::geom::{segment_gaussian, GaussianArea, Line};
use crate::numerics::fd::nearest_branch;
use crate::numerics::quad::gauss_legendre_on;

/// Weight exponent in the sup part of E_W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "case")]
pub enum DistanceCase {
    /// alpha = 1.1.
    A,
    /// alpha = 0, no good blowup assumed.
    B,
    /// alpha = 1 + lambda2.
    C { lambda2: f64 },
    Custom { alpha: f64 },
}

impl DistanceCase {
    pub fn alpha(self) -> f64 {
        match self {
            DistanceCase::A => 1.1,
            DistanceCase::B => 0.0,
            DistanceCase::C { lambda2 } => 1.0 + lambda2,
            DistanceCase::Custom { alpha } => alpha,
        }
    }
}

/// Assignment of every edge of M (inside the ball) to a cone component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeMatching {
    /// Per curve component, per edge: matched cone component (None outside the ball).
    pub edges: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub tau: f64,
    pub alpha: f64,
    pub sup_term: f64,
    pub integral_term: f64,
    pub e_w: f64,
    /// int |theta - theta_W|^2 e^{-|x|^2/4} at the given gradings.
    pub theta_integral: f64,
    /// Optimal per-component grading shifts (clamped).
    pub shifts: Vec<f64>,
    /// The theta integral at the optimal shifts.
    pub theta_infimum: f64,
    pub density: f64,
    pub excess: f64,
    /// The excess is the C^2 formula evaluated on curves.
    pub excess_tag: String,
}

/// Largest grading shift admitted in the infimum.
pub const GRADING_WINDOW: f64 = std::f64::consts::FRAC_PI_2;

/// Relative gap below which two cone components count as equally close.
const MATCH_TIE: f64 = 1e-9;

fn quintic_ramp(r: f64) -> f64 {
    let s = ((r - 0.5) / 0.5).clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

fn cone_distance(lines: &[(Line, f64)], p: [f64; 2]) -> f64 {
    lines.iter().map(|(l, _)| l.distance(p)).fold(f64::INFINITY, f64::min)
}

fn nearest_line(lines: &[(Line, f64)], p: [f64; 2]) -> usize {
    (0..lines.len())
        .min_by(|&a, &b| lines[a].0.distance(p).total_cmp(&lines[b].0.distance(p)))
        .expect("cone has components")
}

/// Portion of segment [p, q] inside the open disc of radius `r`, as parameters.
fn clip_to_disc(p: [f64; 2], q: [f64; 2], r: f64) -> Option<(f64, f64)> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let a = d[0] * d[0] + d[1] * d[1];
    let b = p[0] * d[0] + p[1] * d[1];
    let c = p[0] * p[0] + p[1] * p[1] - r * r;
    let disc = b * b - a * c;
    if disc <= 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let lo = ((-b - s) / a).max(0.0);
    let hi = ((-b + s) / a).min(1.0);
    (hi > lo).then_some((lo, hi))
}

fn lerp(p: [f64; 2], q: [f64; 2], s: f64) -> [f64; 2] {
    [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
}

/// Match edges inside B(0, radius) to cone components: runs in the annulus
/// 1/2 < |x| < radius are split by nearest line and matched by mean distance;
/// edges inside B(0, 1/2) take the nearest line.
pub fn match_components(curve: &ImmersedCurve, lines: &[(Line, f64)], radius: f64) -> Result<ConeMatching> {
    let mut edges = Vec::with_capacity(curve.components.len());
    let mut ambiguous = Vec::new();
    for (ci, c) in curve.components.iter().enumerate() {
        let m = c.len();
        let count = if c.closed { m } else { m - 1 };
        let mids: Vec<[f64; 2]> = (0..count).map(|i| lerp(c.points[i], c.points[(i + 1) % m], 0.5)).collect();
        let mut out: Vec<Option<usize>> = vec![None; count];
        let mut i = 0;
        while i < count {
            let r = mids[i][0].hypot(mids[i][1]);
            if clip_to_disc(c.points[i], c.points[(i + 1) % m], radius).is_none() {
                i += 1;
                continue;
            }
            let near = nearest_line(lines, mids[i]);
            if r <= 0.5 {
                out[i] = Some(near);
                i += 1;
                continue;
            }
            let start = i;
            while i < count {
                let ri = mids[i][0].hypot(mids[i][1]);
                let inside = clip_to_disc(c.points[i], c.points[(i + 1) % m], radius).is_some();
                if ri <= 0.5 || !inside || nearest_line(lines, mids[i]) != near {
                    break;
                }
                i += 1;
            }
            let mut means: Vec<(usize, f64)> = (0..lines.len())
                .map(|j| {
                    let s: f64 = mids[start..i].iter().map(|&p| lines[j].0.distance(p)).sum();
                    (j, s / (i - start) as f64)
                })
                .collect();
            means.sort_by(|a, b| a.1.total_cmp(&b.1));
            if means.len() > 1 && means[1].1 - means[0].1 <= MATCH_TIE * (1.0 + means[0].1) {
                ambiguous.push(format!(
                    "component {ci} edges {start}..{i}: cone components {} or {}",
                    means[0].0, means[1].0
                ));
            }
            for e in out.iter_mut().take(i).skip(start) {
                *e = Some(means[0].0);
            }
        }
        edges.push(out);
    }
    if !ambiguous.is_empty() {
        return Err(LabError::AmbiguousMatching(ambiguous));
    }
    Ok(ConeMatching { edges })
}

fn evaluate(curve: &ImmersedCurve, tau: f64, w: &PlaneUnionCone, case: DistanceCase) -> Result<DistanceReport> {
    let lines = cone_lines(w)?;
    let radius = (0.5 * tau).exp();
    let alpha = case.alpha();
    let matching = match_components(curve, &lines, radius)?;
    let (gx, gw) = gauss_legendre_on(6, 0.0, 1.0);

    let mut sup_term: f64 = 0.0;
    let mut dist_integral = 0.0;
    let mut theta_integral = 0.0;
    // per cone component: sum w, sum w diff, sum w diff^2
    let mut moments = vec![[0.0f64; 3]; lines.len()];
    for (c, assign) in curve.components.iter().zip(&matching.edges) {
        for p in &c.points {
            let r = p[0].hypot(p[1]);
            if r < 2.0 {
                let d = cone_distance(&lines, *p);
                let wgt = if alpha == 0.0 { 1.0 } else { r.powf(alpha) };
                sup_term = sup_term.max(wgt * d);
            }
        }
        let angles = c.edge_angles();
        let m = c.len();
        for (i, a) in assign.iter().enumerate() {
            let (p, q) = (c.points[i], c.points[(i + 1) % m]);
            let Some((lo, hi)) = clip_to_disc(p, q, radius) else { continue };
            let (a0, b0) = (lerp(p, q, lo), lerp(p, q, hi));
            let len = (b0[0] - a0[0]).hypot(b0[1] - a0[1]);
            for (s, wq) in gx.iter().zip(&gw) {
                let x = lerp(a0, b0, *s);
                let r2 = x[0] * x[0] + x[1] * x[1];
                let d = cone_distance(&lines, x);
                dist_integral += wq * len * quintic_ramp(r2.sqrt()) * d * d * (-0.25 * r2).exp();
            }
            let j = a.expect("edges inside the ball are matched");
            let g = segment_gaussian(&a0, &b0);
            let diff = angles[i] - nearest_branch(lines[j].1, angles[i]);
            theta_integral += diff * diff * g;
            moments[j][0] += g;
            moments[j][1] += g * diff;
            moments[j][2] += g * diff * diff;
        }
    }
    let mut shifts = Vec::with_capacity(lines.len());
    let mut theta_infimum = 0.0;
    for mo in &moments {
        let s = if mo[0] > 0.0 { (mo[1] / mo[0]).clamp(-GRADING_WINDOW, GRADING_WINDOW) } else { 0.0 };
        shifts.push(s);
        theta_infimum += (mo[2] - 2.0 * s * mo[1] + s * s * mo[0]).max(0.0);
    }
    let integral_term = (dist_integral + theta_integral).sqrt();
    let density = curve.gaussian_area_with_tol(&[0.0, 0.0], 1.0, 1e-8)?;
    let excess = density - lines.len() as f64 + theta_infimum;
    Ok(DistanceReport {
        tau,
        alpha,
        sup_term,
        integral_term,
        e_w: sup_term + integral_term,
        theta_integral,
        shifts,
        theta_infimum,
        density,
        excess,
        excess_tag: "analog".into(),
    })
}

/// E_W and the excess of one rescaled state.
pub fn distance_functionals(state: &RescaledState, w: &PlaneUnionCone, case: DistanceCase) -> Result<DistanceReport> {
    evaluate(&state.curve, state.tau, w, case)
}

/// Same functionals for an unrescaled slice L_t, through the exact change of variables.
pub fn distance_functionals_at(slice: &ImmersedCurve, center: SpacetimePoint, w: &PlaneUnionCone, case: DistanceCase) -> Result<DistanceReport> {
    let gap = center.t - slice.t;
    if !(gap > 0.0) {
        return Err(LabError::TimeRange(format!("slice at t = {} not before t0 = {}", slice.t, center.t)));
    }
    let tau = -gap.ln();
    evaluate(&slice.transformed(center.x, (0.5 * tau).exp()), tau, w, case)
}

/// int_{M cap B(0,2)} ((4 pi)^{-1/2} |H + x^perp/2|^2 + 2 |H|^2) e^{-|x|^2/4}.
fn excess_rate(curve: &ImmersedCurve) -> f64 {
    let norm = (4.0 * std::f64::consts::PI).sqrt().recip();
    let mut total = 0.0;
    for c in &curve.components {
        for (p, (h, nrm, dual)) in c.points.iter().zip(curvature_vectors(c)) {
            let r2 = p[0] * p[0] + p[1] * p[1];
            if r2 >= 4.0 {
                continue;
            }
            let dn = 0.5 * (p[0] * nrm[0] + p[1] * nrm[1]);
            let v = [h[0] + dn * nrm[0], h[1] + dn * nrm[1]];
            let h2 = h[0] * h[0] + h[1] * h[1];
            total += (norm * (v[0] * v[0] + v[1] * v[1]) + 2.0 * h2) * (-0.25 * r2).exp() * dual;
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessAudit {
    pub tau0: f64,
    pub tau1: f64,
    pub c: f64,
    /// A(tau0) - A(tau1).
    pub lhs: f64,
    /// Space-time integral of the dissipation over [tau0, tau1].
    pub dissipation: f64,
    /// lhs - dissipation + C e^{-tau0}; nonnegative when the inequality holds.
    pub residual: f64,
    /// Smallest C making the inequality hold for every pair of stored states in range.
    pub witness_c: f64,
    pub excess_tag: String,
}

/// Check A(tau0) - A(tau1) >= dissipation - C e^{-tau0} on the stored states
/// with tau in [tau0, tau1].
pub fn excess_monotonicity_audit(
    r: &RescaledTrace,
    w0: &PlaneUnionCone,
    tau0: f64,
    tau1: f64,
    c: f64,
) -> Result<ExcessAudit> {
    if !(tau0 < tau1) {
        return Err(LabError::Parameter("need tau0 < tau1".into()));
    }
    let picked: Vec<&RescaledState> = r
        .states
        .iter()
        .filter(|s| s.tau >= tau0 - 1e-12 && s.tau <= tau1 + 1e-12)
        .collect();
    if picked.len() < 2 {
        return Err(LabError::TimeRange(format!("fewer than two states in [{tau0}, {tau1}]")));
    }
    let mut excess = Vec::with_capacity(picked.len());
    let mut rate = Vec::with_capacity(picked.len());
    for s in &picked {
        excess.push(distance_functionals(s, w0, DistanceCase::A)?.excess);
        rate.push(excess_rate(&s.curve));
    }
    let taus: Vec<f64> = picked.iter().map(|s| s.tau).collect();
    let mut cum = vec![0.0; taus.len()];
    for k in 1..taus.len() {
        cum[k] = cum[k - 1] + 0.5 * (taus[k] - taus[k - 1]) * (rate[k] + rate[k - 1]);
    }
    let mut witness: f64 = 0.0;
    for i in 0..taus.len() {
        for j in i + 1..taus.len() {
            let lhs = excess[i] - excess[j];
            let need = (cum[j] - cum[i] - lhs) * taus[i].exp();
            witness = witness.max(need);
        }
    }
    let last = taus.len() - 1;
    let lhs = excess[0] - excess[last];
    let dissipation = cum[last];
    Ok(ExcessAudit {
        tau0: taus[0],
        tau1: taus[last],
        c,
        lhs,
        dissipation,
        residual: lhs - dissipation + c * (-taus[0]).exp(),
        witness_c: witness,
        excess_tag: "analog".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::fixtures;

    fn state(curve: ImmersedCurve, tau: f64) -> RescaledState {
        RescaledState {
            tau,
            curve,
            interpolation_error: 0.0,
        }
    }

    #[test]
    fn exact_cone_has_zero_functionals() {
        let w = PlaneUnionCone::from_phases(&[vec![0.0], vec![-std::f64::consts::FRAC_PI_2]]).unwrap();
        let m = fixtures::line_union(&fixtures::HYPERBOLA_CONE, 30.0, 0.05).unwrap();
        let r = distance_functionals(&state(m, 3.0), &w, DistanceCase::A).unwrap();
        assert!(r.e_w.abs() < 1e-12, "{}", r.e_w);
        assert!(r.excess.abs() < 1e-10, "{}", r.excess);
        assert_eq!(r.excess_tag, "analog");
    }

    #[test]
    fn grading_shift_is_quadratic() {
        let beta = 0.3;
        let w = PlaneUnionCone::from_phases(&[vec![0.0], vec![1.0 + beta]]).unwrap();
        let m = fixtures::line_union(&[0.0, 1.0], 30.0, 0.05).unwrap();
        let tau = 2.0;
        let r = distance_functionals(&state(m, tau), &w, DistanceCase::B).unwrap();
        let radius = (0.5 * tau).exp();
        let area = 2.0 * std::f64::consts::PI.sqrt() * statrs::function::erf::erf(0.5 * radius);
        assert!((r.theta_integral - beta * beta * area).abs() < 1e-10, "{} {}", r.theta_integral, beta * beta * area);
        assert!(r.theta_infimum.abs() < 1e-20);
        assert!((r.shifts[1] + beta).abs() < 1e-12);
    }

    #[test]
    fn bisector_run_is_ambiguous() {
        let w = PlaneUnionCone::from_phases(&[vec![0.0], vec![std::f64::consts::FRAC_PI_2]]).unwrap();
        let m = fixtures::line(std::f64::consts::FRAC_PI_4, 10.0, 0.1).unwrap();
        let e = distance_functionals(&state(m, 2.0), &w, DistanceCase::A).unwrap_err();
        assert!(matches!(e, LabError::AmbiguousMatching(_)));
    }
}
