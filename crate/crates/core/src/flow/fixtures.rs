//! Standard initial curves.

use std::f64::consts::TAU;

use super::{CurveComponent, ImmersedCurve};
use crate::error::{LabError, Result};

/// Counterclockwise circle of radius `r` about `center`.
pub fn circle_at(center: [f64; 2], r: f64, vertices: usize) -> Result<ImmersedCurve> {
    if !(r > 0.0) || vertices < 3 {
        return Err(LabError::Parameter("circle needs r > 0 and >= 3 vertices".into()));
    }
    let pts = (0..vertices)
        .map(|i| {
            let t = TAU * i as f64 / vertices as f64;
            [center[0] + r * t.cos(), center[1] + r * t.sin()]
        })
        .collect();
    ImmersedCurve::new(vec![CurveComponent::new(pts, true)?], 0.0)
}

pub fn circle(r: f64, vertices: usize) -> Result<ImmersedCurve> {
    circle_at([0.0, 0.0], r, vertices)
}

fn segment_line(angle: f64, half_length: f64, h: f64) -> Result<CurveComponent> {
    if !(h > 0.0) || !(half_length > h) {
        return Err(LabError::Parameter("line needs 0 < h < half_length".into()));
    }
    let m = (2.0 * half_length / h).ceil() as usize;
    let (s, c) = angle.sin_cos();
    let pts = (0..=m)
        .map(|i| {
            let t = -half_length + 2.0 * half_length * i as f64 / m as f64;
            [t * c, t * s]
        })
        .collect();
    CurveComponent::new(pts, false)
}

/// Straight line through the origin, sampled on [-half_length, half_length].
pub fn line(angle: f64, half_length: f64, h: f64) -> Result<ImmersedCurve> {
    ImmersedCurve::new(vec![segment_line(angle, half_length, h)?], 0.0)
}

/// Union of lines through the origin (a static cone).
pub fn line_union(angles: &[f64], half_length: f64, h: f64) -> Result<ImmersedCurve> {
    let comps = angles
        .iter()
        .map(|&a| segment_line(a, half_length, h))
        .collect::<Result<Vec<_>>>()?;
    ImmersedCurve::new(comps, 0.0)
}

/// Resample s -> point(s) on [s0, s1] at near-uniform arclength `h`.
fn resample<F: Fn(f64) -> [f64; 2]>(point: F, s0: f64, s1: f64, h: f64) -> Vec<[f64; 2]> {
    let fine = 200_000;
    let mut arc = Vec::with_capacity(fine + 1);
    let mut par = Vec::with_capacity(fine + 1);
    let mut prev = point(s0);
    let mut acc = 0.0;
    arc.push(0.0);
    par.push(s0);
    for i in 1..=fine {
        let s = s0 + (s1 - s0) * i as f64 / fine as f64;
        let p = point(s);
        acc += (p[0] - prev[0]).hypot(p[1] - prev[1]);
        arc.push(acc);
        par.push(s);
        prev = p;
    }
    let m = (acc / h).ceil().max(2.0) as usize;
    let mut out = Vec::with_capacity(m + 1);
    let mut j = 0;
    for k in 0..=m {
        let target = acc * k as f64 / m as f64;
        while j + 1 < fine && arc[j + 1] < target {
            j += 1;
        }
        let w = if arc[j + 1] > arc[j] { (target - arc[j]) / (arc[j + 1] - arc[j]) } else { 0.0 };
        out.push(point(par[j] + w.clamp(0.0, 1.0) * (par[j + 1] - par[j])));
    }
    out
}

/// The two branches of xy = c (c > 0) in the first and third quadrants,
/// truncated where max(|x|, |y|) = extent. Both branches are oriented so
/// that pieces along the x-axis point in the +x direction; this
/// desingularizes the cone {x-axis} u {y-axis}.
pub fn hyperbola_pair(c: f64, extent: f64, h: f64) -> Result<ImmersedCurve> {
    if !(c > 0.0) || !(extent * extent > c) || !(h > 0.0) {
        return Err(LabError::Parameter("hyperbola needs c > 0, extent^2 > c, h > 0".into()));
    }
    let a = c.sqrt();
    let s_max = (extent / a).ln();
    let q1 = resample(|s| [a * s.exp(), a * (-s).exp()], -s_max, s_max, h);
    let q3 = resample(|s| [-a * (-s).exp(), -a * s.exp()], -s_max, s_max, h);
    ImmersedCurve::new(vec![CurveComponent::new(q1, false)?, CurveComponent::new(q3, false)?], 0.0)
}

/// Angles of the lines of the cone desingularized by `hyperbola_pair`,
/// with gradings matching its orientation.
pub const HYPERBOLA_CONE: [f64; 2] = [0.0, -std::f64::consts::FRAC_PI_2];
