//! Lagrangian potentials and the audits built on them.

mod chart;
mod floer;
mod strip;

pub use chart::{compactify, cutoff, liouville_defect, sphere_coordinates, ChartEval};
pub use floer::{floer_degree, IntersectionDatum};
pub use strip::{
    ball_monotonicity_check, bigon_strip, half_disc, strip_area, BallReport, BoundaryTag, StripReport,
    TriangleSoup,
};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::flow::ImmersedCurve;

/// Default budget for loop periods of lambda.
pub const EXACTNESS_TOL: f64 = 1e-9;

/// A sampled path on a Lagrangian in C^n, points as [x_1..x_n, y_1..y_n].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub points: Vec<Vec<f64>>,
    pub closed: bool,
}

impl PathSample {
    pub fn new(points: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(LabError::Empty("path has no points".into()));
        };
        let d = first.len();
        if d == 0 || d % 2 != 0 || points.iter().any(|p| p.len() != d) {
            return Err(LabError::Parameter("points must share an even dimension 2n".into()));
        }
        Ok(Self { points, closed })
    }

    pub fn from_plane(points: &[[f64; 2]], closed: bool) -> Result<Self> {
        Self::new(points.iter().map(|p| p.to_vec()).collect(), closed)
    }

    pub fn n(&self) -> usize {
        self.points[0].len() / 2
    }

    /// Closest point on the polyline: (segment index, parameter, distance).
    pub fn project(&self, x: &[f64]) -> (usize, f64, f64) {
        let m = self.points.len();
        let segs = if self.closed { m } else { m.saturating_sub(1) };
        if segs == 0 {
            return (0, 0.0, dist(&self.points[0], x));
        }
        let mut best = (0, 0.0, f64::INFINITY);
        for i in 0..segs {
            let (a, b) = (&self.points[i], &self.points[(i + 1) % m]);
            let mut dd = 0.0;
            let mut dx = 0.0;
            for k in 0..a.len() {
                let d = b[k] - a[k];
                dd += d * d;
                dx += (x[k] - a[k]) * d;
            }
            let s = if dd > 0.0 { (dx / dd).clamp(0.0, 1.0) } else { 0.0 };
            let q: Vec<f64> = (0..a.len()).map(|k| a[k] + s * (b[k] - a[k])).collect();
            let d = dist(&q, x);
            if d < best.2 {
                best = (i, s, d);
            }
        }
        best
    }
}

impl From<&ImmersedCurve> for Vec<PathSample> {
    fn from(c: &ImmersedCurve) -> Self {
        c.components
            .iter()
            .map(|k| PathSample {
                points: k.points.iter().map(|p| p.to_vec()).collect(),
                closed: k.closed,
            })
            .collect()
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// int lambda along the straight chord p -> q; exact since lambda is linear.
pub fn chord_lambda(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len() / 2;
    0.5 * (0..n).map(|k| p[k] * q[n + k] - p[n + k] * q[k]).sum::<f64>()
}

/// Potential f with df = lambda on a union of sampled paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialField {
    pub values: Vec<Vec<f64>>,
    /// Per component: (vertex, value) where f was pinned.
    pub anchors: Vec<(usize, f64)>,
    pub normalization: String,
    /// f at the first and last vertex of each open component.
    pub ends: Vec<Option<[f64; 2]>>,
    /// Lambda period of each closed component.
    pub periods: Vec<Option<f64>>,
}

impl PotentialField {
    /// f at an arbitrary point near component `c`, by a chord from the nearest segment start.
    pub fn value_at(&self, path: &PathSample, c: usize, x: &[f64]) -> (f64, f64) {
        let (i, _, d) = path.project(x);
        (self.values[c][i] + chord_lambda(&path.points[i], x), d)
    }

    /// c_phi - c_0 for a single open component.
    pub fn end_difference(&self) -> Option<f64> {
        self.ends.first().copied().flatten().map(|[a, b]| b - a)
    }
}

/// Path-integrate lambda from per-component anchors (vertex, value).
/// Anchors default to f = 0 at vertex 0 of every component.
pub fn integrate_potential(paths: &[PathSample], anchors: Option<&[(usize, f64)]>, tol: f64) -> Result<PotentialField> {
    if paths.is_empty() {
        return Err(LabError::Empty("no components".into()));
    }
    let anchors: Vec<(usize, f64)> = match anchors {
        Some(a) if a.len() == paths.len() => a.to_vec(),
        Some(a) => {
            return Err(LabError::Parameter(format!(
                "{} anchors for {} components",
                a.len(),
                paths.len()
            )))
        }
        None => vec![(0, 0.0); paths.len()],
    };
    let mut values = Vec::with_capacity(paths.len());
    let mut ends = Vec::with_capacity(paths.len());
    let mut periods = Vec::with_capacity(paths.len());
    for (c, (path, &(anchor, f0))) in paths.iter().zip(&anchors).enumerate() {
        let m = path.points.len();
        if anchor >= m {
            return Err(LabError::Parameter(format!("anchor {anchor} outside component {c}")));
        }
        let mut acc = vec![0.0; m];
        for i in 1..m {
            acc[i] = acc[i - 1] + chord_lambda(&path.points[i - 1], &path.points[i]);
        }
        if path.closed {
            let period = acc[m - 1] + chord_lambda(&path.points[m - 1], &path.points[0]);
            if period.abs() > tol {
                return Err(LabError::NonExact { component: c, period });
            }
            periods.push(Some(period));
        } else {
            periods.push(None);
        }
        let shift = f0 - acc[anchor];
        let f: Vec<f64> = acc.iter().map(|v| v + shift).collect();
        ends.push((!path.closed).then(|| [f[0], f[m - 1]]));
        values.push(f);
    }
    Ok(PotentialField {
        values,
        anchors,
        normalization: "per-component anchor; df = lambda by exact chord integration".into(),
        ends,
        periods,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityReport {
    pub eps: f64,
    pub c0: f64,
    pub c: f64,
    /// e^{-1/(c0 eps^2)}.
    pub floor: f64,
    pub worst_ratio: f64,
    /// ((component, vertex), (component, vertex)) of the worst pair.
    pub worst_pair: Option<((usize, usize), (usize, usize))>,
    pub flagged: usize,
    pub flagged_examples: Vec<((usize, usize), (usize, usize), f64)>,
    pub pairs: usize,
}

/// Default constants of the equicontinuity audit.
pub const EQUICONTINUITY_C0: f64 = 1.0;
pub const EQUICONTINUITY_C: f64 = 10.0;

/// max |f(p) - f(q)| / (|p - q| + e^{-1/(c0 eps^2)}) over all sampled pairs.
pub fn equicontinuity_audit(
    paths: &[PathSample],
    f: &PotentialField,
    eps: f64,
    c0: f64,
    c: f64,
) -> Result<EquicontinuityReport> {
    if !(c0 > 0.0) || !(c > 0.0) || !(eps >= 0.0) {
        return Err(LabError::Parameter("need c0 > 0, c > 0 and eps >= 0".into()));
    }
    let floor = if eps == 0.0 { 0.0 } else { (-1.0 / (c0 * eps * eps)).exp() };
    let samples: Vec<((usize, usize), &[f64], f64)> = paths
        .iter()
        .enumerate()
        .flat_map(|(ci, p)| {
            p.points
                .iter()
                .enumerate()
                .map(move |(vi, x)| ((ci, vi), x.as_slice(), f.values[ci][vi]))
        })
        .collect();
    let mut rep = EquicontinuityReport {
        eps,
        c0,
        c,
        floor,
        worst_ratio: 0.0,
        worst_pair: None,
        flagged: 0,
        flagged_examples: Vec::new(),
        pairs: 0,
    };
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let (a, pa, fa) = samples[i];
            let (b, pb, fb) = samples[j];
            let df = (fa - fb).abs();
            let den = dist(pa, pb) + floor;
            rep.pairs += 1;
            let ratio = if den > 0.0 { df / den } else if df > 0.0 { f64::INFINITY } else { 0.0 };
            if ratio > rep.worst_ratio {
                rep.worst_ratio = ratio;
                rep.worst_pair = Some((a, b));
            }
            if ratio > c {
                rep.flagged += 1;
                if rep.flagged_examples.len() < 8 {
                    rep.flagged_examples.push((a, b, ratio));
                }
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeAudit {
    pub eps: f64,
    pub c: f64,
    pub radii: Vec<f64>,
    pub volume: Vec<f64>,
    /// min_r Vol / (omega_1 r) - (1 - C eps^2).
    pub lower_margin: f64,
    /// Vol / (omega_1 r^{cos eps}) per radius.
    pub monotone_ratio: Vec<f64>,
    /// (r_k, drop) where the ratio decreased by more than the tolerance.
    pub violations: Vec<(f64, f64)>,
}

/// Length of the polyline inside the open disc B(p, r).
fn length_in_disc(c: &ImmersedCurve, p: [f64; 2], r: f64) -> f64 {
    let mut total = 0.0;
    for k in &c.components {
        let m = k.len();
        let segs = if k.closed { m } else { m - 1 };
        for i in 0..segs {
            let (a, b) = (k.points[i], k.points[(i + 1) % m]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let aa = d[0] * d[0] + d[1] * d[1];
            let bb = (a[0] - p[0]) * d[0] + (a[1] - p[1]) * d[1];
            let cc = (a[0] - p[0]).powi(2) + (a[1] - p[1]).powi(2) - r * r;
            let disc = bb * bb - aa * cc;
            if disc <= 0.0 {
                continue;
            }
            let s = disc.sqrt();
            let lo = ((-bb - s) / aa).max(0.0);
            let hi = ((-bb + s) / aa).min(1.0);
            if hi > lo {
                total += (hi - lo) * aa.sqrt();
            }
        }
    }
    total
}

/// Lower volume bound and almost-monotonicity of Vol(L cap B(p, r)) for curves.
pub fn volume_monotonicity_audit(l: &ImmersedCurve, p: [f64; 2], eps: f64, c: f64, radii: &[f64], tol: f64) -> Result<VolumeAudit> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Parameter("radii must be positive and increasing".into()));
    }
    let omega1 = 2.0;
    let volume: Vec<f64> = radii.iter().map(|&r| length_in_disc(l, p, r)).collect();
    let lower_margin = radii
        .iter()
        .zip(&volume)
        .map(|(r, v)| v / (omega1 * r) - (1.0 - c * eps * eps))
        .fold(f64::INFINITY, f64::min);
    let monotone_ratio: Vec<f64> = radii.iter().zip(&volume).map(|(r, v)| v / (omega1 * r.powf(eps.cos()))).collect();
    let violations = monotone_ratio
        .windows(2)
        .zip(&radii[1..])
        .filter(|(w, _)| w[0] - w[1] > tol * w[0].max(1.0))
        .map(|(w, r)| (*r, w[0] - w[1]))
        .collect();
    Ok(VolumeAudit {
        eps,
        c,
        radii: radii.to_vec(),
        volume,
        lower_margin,
        monotone_ratio,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::fixtures;

    #[test]
    fn line_potential_is_constant() {
        let c = fixtures::line(0.7, 3.0, 0.1).unwrap();
        let paths: Vec<PathSample> = (&c).into();
        let f = integrate_potential(&paths, Some(&[(5, 2.5)]), EXACTNESS_TOL).unwrap();
        assert!(f.values[0].iter().all(|v| (v - 2.5).abs() < 1e-15));
    }

    #[test]
    fn circle_is_not_exact() {
        let c = fixtures::circle(2.0, 4000).unwrap();
        let paths: Vec<PathSample> = (&c).into();
        match integrate_potential(&paths, None, EXACTNESS_TOL) {
            Err(LabError::NonExact { component, period }) => {
                assert_eq!(component, 0);
                assert!((period - 4.0 * std::f64::consts::PI).abs() < 1e-5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn near_touching_sheets_are_flagged() {
        let sheet = |y: f64| -> PathSample {
            PathSample::new((0..=200).map(|i| vec![-1.0 + 0.01 * i as f64, y]).collect(), false).unwrap()
        };
        let paths = vec![sheet(0.0), sheet(1e-3)];
        let f = integrate_potential(&paths, Some(&[(100, 0.0), (100, 1.0)]), EXACTNESS_TOL).unwrap();
        let rep = equicontinuity_audit(&paths, &f, 0.1, EQUICONTINUITY_C0, EQUICONTINUITY_C).unwrap();
        assert!((rep.worst_ratio - 1e3).abs() < 1.0, "{}", rep.worst_ratio);
        assert!(rep.flagged > 0);
    }

    #[test]
    fn line_volume_is_exact() {
        let c = fixtures::line_union(&[0.0, 1.0], 5.0, 0.1).unwrap();
        let radii: Vec<f64> = (1..20).map(|i| 0.2 * i as f64).collect();
        let a = volume_monotonicity_audit(&c, [0.0, 0.0], 0.0, 1.0, &radii, 1e-12).unwrap();
        for (r, v) in radii.iter().zip(&a.volume) {
            assert!((v - 4.0 * r).abs() < 1e-12);
        }
        assert!(a.violations.is_empty());
        assert!(a.monotone_ratio.iter().all(|x| (x - 2.0).abs() < 1e-12));
    }
}
