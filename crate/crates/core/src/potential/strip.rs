use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{PathSample, PotentialField};
use crate::cone::PlaneComponent;
use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryTag {
    Interior,
    L,
    LPrime,
    Corner,
}

/// Indexed triangle soup in C^n with per-vertex boundary tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleSoup {
    pub vertices: Vec<Vec<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub tags: Vec<BoundaryTag>,
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn omega(u: &[f64], v: &[f64]) -> f64 {
    let n = u.len() / 2;
    (0..n).map(|k| u[k] * v[n + k] - u[n + k] * v[k]).sum()
}

impl TriangleSoup {
    pub fn validate(&self) -> Result<()> {
        let d = self.vertices.first().map(|v| v.len()).unwrap_or(0);
        if d == 0 || d % 2 != 0 || self.vertices.iter().any(|v| v.len() != d) {
            return Err(LabError::Parameter("vertices must share an even dimension".into()));
        }
        if self.tags.len() != self.vertices.len() {
            return Err(LabError::Parameter("one tag per vertex required".into()));
        }
        if self.triangles.iter().flatten().any(|&i| i >= self.vertices.len()) {
            return Err(LabError::Parameter("triangle index out of range".into()));
        }
        Ok(())
    }

    /// int omega over the oriented piecewise flat surface.
    pub fn omega_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = &self.vertices[t[0]];
                0.5 * omega(&sub(&self.vertices[t[1]], a), &sub(&self.vertices[t[2]], a))
            })
            .sum()
    }

    /// Edges used by exactly one triangle.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut count: HashMap<[usize; 2], usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry([a.min(b), a.max(b)]).or_default() += 1;
            }
        }
        let mut e: Vec<[usize; 2]> = count.into_iter().filter(|(_, c)| *c == 1).map(|(e, _)| e).collect();
        e.sort();
        e
    }

    /// Embed a soup in C as the graph (x, 0, y, f(x, y)) in C^2.
    pub fn lift_to_c2<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for v in out.vertices.iter_mut() {
            let (x, y) = (v[0], v[1]);
            *v = vec![x, 0.0, y, f(x, y)];
        }
        out
    }

    /// Euclidean area of the part inside the ball B(p, r).
    pub fn area_in_ball(&self, p: &[f64], r: f64) -> f64 {
        self.triangles
            .iter()
            .map(|t| triangle_ball_area(&self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]], p, r))
            .sum()
    }
}

/// Signed area of disc(0, r) cap triangle(0, a, b) in the plane.
fn wedge_disc(a: [f64; 2], b: [f64; 2], r: f64) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let aa = d[0] * d[0] + d[1] * d[1];
    let mut cuts = vec![0.0];
    if aa > 0.0 {
        let bb = a[0] * d[0] + a[1] * d[1];
        let cc = a[0] * a[0] + a[1] * a[1] - r * r;
        let disc = bb * bb - aa * cc;
        if disc > 0.0 {
            let s = disc.sqrt();
            for t in [(-bb - s) / aa, (-bb + s) / aa] {
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.push(1.0);
    let at = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (u, v) = (at(w[0]), at(w[1]));
        let m = at(0.5 * (w[0] + w[1]));
        let cross = u[0] * v[1] - u[1] * v[0];
        if m[0] * m[0] + m[1] * m[1] <= r * r {
            total += 0.5 * cross;
        } else {
            total += 0.5 * r * r * cross.atan2(u[0] * v[0] + u[1] * v[1]);
        }
    }
    total
}

/// Area of triangle(a, b, c) cap B(p, r) in R^d, exactly.
fn triangle_ball_area(a: &[f64], b: &[f64], c: &[f64], p: &[f64], r: f64) -> f64 {
    let u = sub(b, a);
    let lu = dot(&u, &u).sqrt();
    if lu == 0.0 {
        return 0.0;
    }
    let e1: Vec<f64> = u.iter().map(|x| x / lu).collect();
    let w = sub(c, a);
    let w1 = dot(&w, &e1);
    let perp: Vec<f64> = w.iter().zip(&e1).map(|(x, e)| x - w1 * e).collect();
    let lp = dot(&perp, &perp).sqrt();
    if lp <= 1e-300 {
        return 0.0;
    }
    let e2: Vec<f64> = perp.iter().map(|x| x / lp).collect();
    let q = sub(p, a);
    let (q1, q2) = (dot(&q, &e1), dot(&q, &e2));
    let h2 = (dot(&q, &q) - q1 * q1 - q2 * q2).max(0.0);
    if h2 >= r * r {
        return 0.0;
    }
    let rr = (r * r - h2).sqrt();
    let pts = [[-q1, -q2], [lu - q1, -q2], [w1 - q1, lp - q2]];
    let s = wedge_disc(pts[0], pts[1], rr) + wedge_disc(pts[1], pts[2], rr) + wedge_disc(pts[2], pts[0], rr);
    s.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripReport {
    /// (f_L - f_L')(q) - (f_L - f_L')(p).
    pub potential_value: f64,
    pub direct_area: f64,
    pub discrepancy: f64,
    pub note: String,
}

/// Compare int_Sigma omega with the potential difference at the corners.
#[allow(clippy::too_many_arguments)]
pub fn strip_area(
    l: &PathSample,
    f_l: &PotentialField,
    l2: &PathSample,
    f_l2: &PotentialField,
    p: &[f64],
    q: &[f64],
    strip: &TriangleSoup,
    tol: f64,
) -> Result<StripReport> {
    strip.validate()?;
    for (i, (v, tag)) in strip.vertices.iter().zip(&strip.tags).enumerate() {
        let (d1, d2) = (l.project(v).2, l2.project(v).2);
        let bad = match tag {
            BoundaryTag::Interior => false,
            BoundaryTag::L => d1 > tol,
            BoundaryTag::LPrime => d2 > tol,
            BoundaryTag::Corner => d1 > tol || d2 > tol,
        };
        if bad {
            return Err(LabError::Boundary(format!(
                "vertex {i} tagged {tag:?} is {:.3e} from L and {:.3e} from L'",
                d1, d2
            )));
        }
    }
    let mut diff = [0.0; 2];
    for (slot, x) in [p, q].into_iter().enumerate() {
        let (a, da) = f_l.value_at(l, 0, x);
        let (b, db) = f_l2.value_at(l2, 0, x);
        if da > tol || db > tol {
            return Err(LabError::Boundary(format!("corner {slot} is not on both Lagrangians")));
        }
        diff[slot] = a - b;
    }
    let potential_value = diff[1] - diff[0];
    let direct_area = strip.omega_area();
    Ok(StripReport {
        potential_value,
        direct_area,
        discrepancy: (potential_value - direct_area).abs(),
        note: "Stokes identity on the sampled strip; holomorphicity is not assumed".into(),
    })
}

/// Bigon between y = 0 and y = s g(x) on [a, b] in C with g(a) = g(b) = 0.
/// Returns the strip, the two boundary paths and the corners.
pub fn bigon_strip<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, m: usize, s: f64) -> Result<(TriangleSoup, PathSample, PathSample)> {
    if m < 2 || !(b > a) {
        return Err(LabError::Parameter("bigon needs m >= 2 and a < b".into()));
    }
    let xs: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
    let mut vertices = Vec::with_capacity(2 * (m + 1));
    let mut tags = Vec::with_capacity(2 * (m + 1));
    for (i, &x) in xs.iter().enumerate() {
        let end = i == 0 || i == m;
        vertices.push(vec![x, 0.0]);
        tags.push(if end { BoundaryTag::Corner } else { BoundaryTag::L });
        vertices.push(vec![x, if end { 0.0 } else { s * g(x) }]);
        tags.push(if end { BoundaryTag::Corner } else { BoundaryTag::LPrime });
    }
    let mut triangles = Vec::with_capacity(2 * m);
    for i in 0..m {
        let (b0, t0, b1, t1) = (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
        triangles.push([b0, b1, t1]);
        triangles.push([b0, t1, t0]);
    }
    let bottom = PathSample::new(xs.iter().map(|&x| vec![x, 0.0]).collect(), false)?;
    let top = PathSample::new(
        xs.iter()
            .enumerate()
            .map(|(i, &x)| vec![x, if i == 0 || i == m { 0.0 } else { s * g(x) }])
            .collect(),
        false,
    )?;
    Ok((
        TriangleSoup {
            vertices,
            triangles,
            tags,
        },
        bottom,
        top,
    ))
}

/// Polar-grid half disc {y >= 0} (or full disc) of radius `radius` in C.
pub fn half_disc(radius: f64, rings: usize, sectors: usize, full: bool) -> Result<TriangleSoup> {
    if rings == 0 || sectors < 2 || !(radius > 0.0) {
        return Err(LabError::Parameter("need rings >= 1, sectors >= 2, radius > 0".into()));
    }
    let span = if full { std::f64::consts::TAU } else { std::f64::consts::PI };
    let cols = if full { sectors } else { sectors + 1 };
    let mut vertices = vec![vec![0.0, 0.0]];
    let mut tags = vec![if full { BoundaryTag::Interior } else { BoundaryTag::L }];
    for k in 1..=rings {
        let rho = radius * k as f64 / rings as f64;
        for j in 0..cols {
            let t = span * j as f64 / sectors as f64;
            vertices.push(vec![rho * t.cos(), rho * t.sin()]);
            let on_axis = !full && (j == 0 || j == sectors);
            tags.push(if on_axis { BoundaryTag::L } else { BoundaryTag::Interior });
        }
    }
    let idx = |k: usize, j: usize| 1 + (k - 1) * cols + (j % cols);
    let mut triangles = Vec::new();
    for j in 0..sectors {
        triangles.push([0, idx(1, j), idx(1, j + 1)]);
        for k in 1..rings {
            let (a, b, c, d) = (idx(k, j), idx(k + 1, j), idx(k + 1, j + 1), idx(k, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Ok(TriangleSoup {
        vertices,
        triangles,
        tags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallReport {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub threshold: f64,
    pub holds: bool,
}

/// min over the radius grid of Area(Sigma cap B(p, r)) / r^2, after checking
/// that the boundary of Sigma inside B(p, max r) lies on the plane `l`.
pub fn ball_monotonicity_check(
    sigma: &TriangleSoup,
    l: &PlaneComponent,
    p: &[f64],
    radii: &[f64],
    threshold: f64,
    tol: f64,
) -> Result<BallReport> {
    sigma.validate()?;
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    if radii.is_empty() || !(r_max > 0.0) || r_max > 1.0 + 1e-12 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(LabError::Parameter("radii must lie in (0, 1]".into()));
    }
    let n = l.n();
    if sigma.vertices[0].len() != 2 * n || p.len() != 2 * n {
        return Err(LabError::Parameter("surface and plane dimensions differ".into()));
    }
    // real orthonormal basis [Re u; Im u] of the plane
    let basis: Vec<Vec<f64>> = l
        .frame
        .iter()
        .map(|col| col.iter().map(|z| z.re).chain(col.iter().map(|z| z.im)).collect())
        .collect();
    let off_plane = |x: &[f64]| -> f64 {
        let mut r2 = dot(x, x);
        for b in &basis {
            let c = dot(x, b);
            r2 -= c * c;
        }
        r2.max(0.0).sqrt()
    };
    for [a, b] in sigma.boundary_edges() {
        let (va, vb) = (&sigma.vertices[a], &sigma.vertices[b]);
        let d = sub(vb, va);
        let dd = dot(&d, &d);
        let t = if dd > 0.0 { (dot(&sub(p, va), &d) / dd).clamp(0.0, 1.0) } else { 0.0 };
        let closest: Vec<f64> = va.iter().zip(&d).map(|(x, y)| x + t * y).collect();
        if dot(&sub(&closest, p), &sub(&closest, p)).sqrt() >= r_max {
            continue;
        }
        for v in [va, vb] {
            let e = off_plane(v);
            if e > tol {
                return Err(LabError::Boundary(format!("boundary vertex {e:.3e} off L inside the ball")));
            }
        }
    }
    let ratios: Vec<f64> = radii.iter().map(|&r| sigma.area_in_ball(p, r) / (r * r)).collect();
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(BallReport {
        radii: radii.to_vec(),
        ratios,
        min_ratio,
        threshold,
        holds: min_ratio >= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{integrate_potential, EXACTNESS_TOL};

    #[test]
    fn wedge_matches_sector_and_triangle() {
        // quarter disc of radius 1 inside a large right triangle
        let a = wedge_disc([5.0, 0.0], [0.0, 5.0], 1.0);
        assert!((a - std::f64::consts::FRAC_PI_4 / 2.0 * 2.0 / 2.0 * 2.0).abs() < 1e-14);
        let small = wedge_disc([0.1, 0.0], [0.0, 0.1], 1.0);
        assert!((small - 0.005).abs() < 1e-15);
    }

    #[test]
    fn bigon_identity() {
        let (soup, l, l2) = bigon_strip(f64::sin, 0.0, std::f64::consts::PI, 2000, 1.0).unwrap();
        let fl = integrate_potential(std::slice::from_ref(&l), None, EXACTNESS_TOL).unwrap();
        let fl2 = integrate_potential(std::slice::from_ref(&l2), None, EXACTNESS_TOL).unwrap();
        let r = strip_area(&l, &fl, &l2, &fl2, &[0.0, 0.0], &[std::f64::consts::PI, 0.0], &soup, 1e-9).unwrap();
        assert!(r.discrepancy < 1e-12);
        assert!((r.direct_area - 2.0).abs() < 1e-6);
    }

    #[test]
    fn discs() {
        let l = PlaneComponent::diagonal(&[0.0], 0);
        let radii: Vec<f64> = (1..=10).map(|i| 0.1 * i as f64).collect();
        let h = half_disc(2.0, 4, 64, false).unwrap();
        let r = ball_monotonicity_check(&h, &l, &[0.0, 0.0], &radii, 1.0, 1e-12).unwrap();
        for x in &r.ratios {
            assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        }
        let f = half_disc(2.0, 4, 64, true).unwrap();
        let r = ball_monotonicity_check(&f, &l, &[0.0, 0.0], &radii, 1.0, 1e-12).unwrap();
        assert!((r.min_ratio - std::f64::consts::PI).abs() < 1e-13);
        let tilted = PlaneComponent::diagonal(&[0.5], 0);
        assert!(matches!(
            ball_monotonicity_check(&h, &tilted, &[0.0, 0.0], &radii, 1.0, 1e-9),
            Err(LabError::Boundary(_))
        ));
    }
}
