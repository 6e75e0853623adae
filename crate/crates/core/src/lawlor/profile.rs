use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lawlor_forward, LawlorParams, NeckIntegrand};
use crate::error::{LabError, Result};
use crate::geom::{continue_branch, GaussianArea};
use crate::numerics::{fd, quad};

/// Sample grid y = Y sinh(beta u) / sinh(beta), u uniform on [-1, 1].
///
/// Spacing is roughly geometric in |y| away from the origin, with ratio
/// about exp(2 beta / (points - 1)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub y_max: f64,
    pub points: usize,
    /// beta; defaults to asinh(Y), which makes y = sinh(beta u).
    pub stretch: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            y_max: 1e3,
            points: 8001,
            stretch: None,
        }
    }
}

impl GridSpec {
    pub fn beta(&self) -> f64 {
        self.stretch.unwrap_or_else(|| self.y_max.asinh())
    }

    pub fn nodes(&self) -> Vec<f64> {
        let m = self.points;
        let beta = self.beta();
        let scale = self.y_max / beta.sinh();
        (0..m)
            .map(|i| {
                let u = -1.0 + 2.0 * i as f64 / (m - 1) as f64;
                scale * (beta * u).sinh()
            })
            .collect()
    }

    /// Relative spacing h/|y| at the far ends.
    pub fn relative_spacing(&self) -> f64 {
        2.0 * self.beta() / (self.points - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 5 || !(self.y_max > 0.0) {
            return Err(LabError::Parameter(format!(
                "grid needs >= 5 points and Y > 0, got {} and {}",
                self.points, self.y_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileMeta {
    Lawlor { params: LawlorParams },
    Generic,
}

/// Equivariant Lagrangian {(z_1(y) x_1, .., z_n(y) x_n) : |x| = 1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileLagrangian {
    pub y: Vec<f64>,
    /// z[i][k] = z_k(y_i).
    pub z: Vec<Vec<Complex64>>,
    /// psi[i][k] = continuous phase of z_k(y_i).
    pub psi: Vec<Vec<f64>>,
    pub meta: ProfileMeta,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ProfileLagrangian {
    /// Generic profile from samples; phases are continued from the first
    /// sample's principal value.
    pub fn from_samples(y: Vec<f64>, z: Vec<Vec<Complex64>>) -> Result<Self> {
        if y.len() != z.len() || y.len() < 5 {
            return Err(LabError::Parameter("profile needs >= 5 matching samples".into()));
        }
        if y.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LabError::Parameter("profile grid must be increasing".into()));
        }
        let n = z[0].len();
        if z.iter().any(|row| row.len() != n) {
            return Err(LabError::Parameter("ragged profile samples".into()));
        }
        let mut psi = vec![vec![0.0; n]; y.len()];
        for k in 0..n {
            let mut col: Vec<f64> = z.iter().map(|row| row[k].arg()).collect();
            fd::unwrap(&mut col);
            for (i, v) in col.into_iter().enumerate() {
                psi[i][k] = v;
            }
        }
        Ok(Self {
            y,
            z,
            psi,
            meta: ProfileMeta::Generic,
            warnings: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.z[0].len()
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// dz_k/dy by second-order finite differences.
    pub fn derivative(&self) -> Vec<Vec<Complex64>> {
        let n = self.n();
        let m = self.len();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; m];
        for k in 0..n {
            let re: Vec<f64> = self.z.iter().map(|r| r[k].re).collect();
            let im: Vec<f64> = self.z.iter().map(|r| r[k].im).collect();
            let dre = fd::derivative(&self.y, &re);
            let dim = fd::derivative(&self.y, &im);
            for i in 0..m {
                out[i][k] = Complex64::new(dre[i], dim[i]);
            }
        }
        out
    }

    /// dz_k/dy by five-point stencils.
    pub fn derivative_high_order(&self) -> Vec<Vec<Complex64>> {
        let n = self.n();
        let m = self.len();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; m];
        for k in 0..n {
            let re: Vec<f64> = self.z.iter().map(|r| r[k].re).collect();
            let im: Vec<f64> = self.z.iter().map(|r| r[k].im).collect();
            let dre = fd::derivative5(&self.y, &re);
            let dim = fd::derivative5(&self.y, &im);
            for i in 0..m {
                out[i][k] = Complex64::new(dre[i], dim[i]);
            }
        }
        out
    }

    /// Root-mean-square of |z_k| (the sphere average of |Zx|^2, square-rooted).
    pub fn radius(&self, i: usize) -> f64 {
        let n = self.n() as f64;
        (self.z[i].iter().map(|c| c.norm_sqr()).sum::<f64>() / n).sqrt()
    }

    /// The dilate s L, parametrized by the same y.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for row in out.z.iter_mut() {
            for c in row.iter_mut() {
                *c *= s;
            }
        }
        out.meta = match &self.meta {
            ProfileMeta::Lawlor { params } => {
                let mut p = params.clone();
                p.a = p.a.iter().map(|a| a / (s * s)).collect();
                p.area *= s * s;
                ProfileMeta::Lawlor { params: p }
            }
            ProfileMeta::Generic => ProfileMeta::Generic,
        };
        out
    }

    /// Sampled-Lagrangian records of the profile curve (the point with
    /// sphere coordinate x = (1, .., 1)/sqrt(n) scaled back to the z_k).
    pub fn to_records(
        &self,
        theta: Option<&[f64]>,
        f: Option<&[f64]>,
    ) -> (crate::geom::records::Header, Vec<crate::geom::records::SampleRecord>) {
        use crate::geom::records::{Header, SampleRecord};
        use std::collections::BTreeMap;
        let n = self.n();
        let mut h = Header::new(n, 1);
        h.channels = (1..=n).map(|k| format!("psi{k}")).collect();
        if theta.is_some() {
            h.channels.push("theta".into());
        }
        if f.is_some() {
            h.channels.push("f".into());
        }
        h.meta.insert(
            "profile".into(),
            serde_json::to_value(&self.meta).unwrap_or(serde_json::Value::Null),
        );
        let recs = (0..self.len())
            .map(|i| {
                let mut ch = BTreeMap::new();
                for k in 0..n {
                    ch.insert(format!("psi{}", k + 1), self.psi[i][k]);
                }
                SampleRecord {
                    c: 0,
                    s: self.y[i],
                    x: crate::geom::to_real(&self.z[i]),
                    theta: theta.map(|t| t[i]),
                    f: f.map(|t| t[i]),
                    ch,
                }
            })
            .collect();
        (h, recs)
    }
}

/// Build the Lawlor neck profile z_k(y) = e^{i psi_k(y)} sqrt(1/a_k + y^2).
pub fn lawlor_profile(a: &[f64], grid: &GridSpec) -> Result<ProfileLagrangian> {
    grid.validate()?;
    let params = lawlor_forward(a)?;
    let g = NeckIntegrand::new(a);
    let y = grid.nodes();
    let n = a.len();
    let m = y.len();
    let mut psi = vec![vec![0.0; n]; m];
    let s: Vec<f64> = y.iter().map(|v| v.atan()).collect();
    let half_pi = std::f64::consts::FRAC_PI_2;
    for k in 0..n {
        let f = |t: f64| g.phi_density(k, t);
        let mut acc = quad::integrate(f, -half_pi, s[0], 1e-14, 2000)?.value;
        psi[0][k] = acc;
        for i in 1..m {
            acc += quad::integrate(f, s[i - 1], s[i], 1e-15, 200)?.value;
            psi[i][k] = acc;
        }
    }
    let z = (0..m)
        .map(|i| {
            (0..n)
                .map(|k| Complex64::from_polar((1.0 / a[k] + y[i] * y[i]).sqrt(), psi[i][k]))
                .collect()
        })
        .collect();
    let mut warnings = Vec::new();
    let rel = grid.relative_spacing();
    if rel > 0.02 {
        warnings.push(format!(
            "relative end spacing {rel:.3e} is coarse; second-order residuals will be large"
        ));
    }
    let gap = (0..n)
        .map(|k| (psi[m - 1][k] - params.phi[k]).abs())
        .fold(0.0, f64::max);
    if gap > 1e-6 {
        warnings.push(format!("phase gap at the far end is {gap:.3e}; extend y_max"));
    }
    Ok(ProfileLagrangian {
        y,
        z,
        psi,
        meta: ProfileMeta::Lawlor { params },
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialResidual {
    /// sup |theta| with the branch anchored at 0 on the Pi_0 end.
    pub sup_angle: f64,
    /// sup of the normalized omega-pullback residual.
    pub sup_omega: f64,
    /// The angle channel along y (sup over the sampled sphere directions).
    pub angle: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Sphere directions used to sample equivariant quantities: the coordinate
/// axes and the diagonal.
fn sample_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        })
        .collect();
    dirs.push(vec![1.0 / (n as f64).sqrt(); n]);
    dirs
}

/// Lagrangian angle along the profile for the frame (-d/dy, sphere tangents).
///
/// On that frame Omega = -prod_k z_k * sum_k (z_k'/z_k) x_k^2.
pub(crate) fn profile_angles(p: &ProfileLagrangian, dz: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let n = p.n();
    sample_directions(n)
        .iter()
        .map(|x| {
            let mut th: Vec<f64> = (0..p.len())
                .map(|i| {
                    let s: Complex64 = (0..n).map(|k| dz[i][k] / p.z[i][k] * x[k] * x[k]).sum();
                    let base: f64 = p.z[i].iter().map(|c| c.arg()).sum();
                    base + (-s).arg()
                })
                .collect();
            continue_branch(&mut th, 0, 0.0);
            th
        })
        .collect()
}

pub fn special_residual(p: &ProfileLagrangian) -> SpecialResidual {
    let dz = p.derivative();
    let angles = profile_angles(p, &dz);
    let m = p.len();
    let mut angle = vec![0.0; m];
    let mut sup_angle: f64 = 0.0;
    for i in 0..m {
        let worst = angles.iter().map(|a| a[i]).fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        angle[i] = worst;
        sup_angle = sup_angle.max(worst.abs());
    }
    let mut sup_omega: f64 = 0.0;
    for i in 0..m {
        let c: Vec<f64> = (0..p.n()).map(|k| (dz[i][k].conj() * p.z[i][k]).im).collect();
        let hi = c.iter().cloned().fold(f64::MIN, f64::max);
        let lo = c.iter().cloned().fold(f64::MAX, f64::min);
        let scale = dz[i].iter().map(|v| v.norm()).fold(0.0, f64::max)
            * p.z[i].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            sup_omega = sup_omega.max(0.5 * (hi - lo) / scale);
        }
    }
    SpecialResidual {
        sup_angle,
        sup_omega,
        angle,
        warnings: p.warnings.clone(),
    }
}

/// Product Gauss rule on S^{n-1} in nested spherical angles.
pub(crate) fn sphere_rule(n: usize, m: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    if n == 1 {
        return (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]);
    }
    let (inner_x, inner_w) = sphere_rule(n - 1, m);
    let (t, tw) = quad::gauss_legendre_on(m, 0.0, std::f64::consts::PI);
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for (ti, twi) in t.iter().zip(&tw) {
        let (s, c) = ti.sin_cos();
        let jac = s.powi(n as i32 - 2);
        for (y, yw) in inner_x.iter().zip(&inner_w) {
            let mut p = vec![c];
            p.extend(y.iter().map(|v| v * s));
            xs.push(p);
            ws.push(twi * jac * yw);
        }
    }
    (xs, ws)
}

/// Orthonormal basis of the complement of the unit vector x in R^n.
fn complement_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
    for e in 0..n {
        let mut v = vec![0.0; n];
        v[e] = 1.0;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= d * bi;
            }
        }
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.iter().map(|t| t / norm).collect());
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Angles per axis used by the profile Gaussian area.
pub const SPHERE_POINTS: usize = 16;

impl GaussianArea for ProfileLagrangian {
    fn dimension(&self) -> usize {
        self.n()
    }

    fn gaussian_area_with_tol(&self, x0: &[f64], r: f64, tol: f64) -> Result<f64> {
        let n = self.n();
        if x0.len() != 2 * n {
            return Err(LabError::Parameter("center dimension mismatch".into()));
        }
        let dz = self.derivative();
        let (dirs, weights) = sphere_rule(n, SPHERE_POINTS);
        let frames: Vec<Vec<Vec<f64>>> = dirs.iter().map(|x| complement_basis(x)).collect();
        let c0: Vec<Complex64> = crate::geom::to_complex(x0);
        let mut integrand = vec![0.0; self.len()];
        for (i, out) in integrand.iter_mut().enumerate() {
            let mut acc = 0.0;
            for ((x, w), vs) in dirs.iter().zip(&weights).zip(&frames) {
                let mut dist2 = 0.0;
                for k in 0..n {
                    dist2 += ((self.z[i][k] * x[k] - c0[k]) / r).norm_sqr();
                }
                // tangent vectors in C^n: X_y and X_v
                let mut tang: Vec<Vec<Complex64>> = Vec::with_capacity(n);
                tang.push((0..n).map(|k| dz[i][k] * x[k]).collect());
                for v in vs {
                    tang.push((0..n).map(|k| self.z[i][k] * v[k]).collect());
                }
                let gram = nalgebra::DMatrix::from_fn(n, n, |a, b| {
                    tang[a].iter().zip(&tang[b]).map(|(p, q)| (p.conj() * q).re).sum::<f64>()
                });
                let vol = gram.determinant().max(0.0).sqrt();
                acc += w * vol * (-0.25 * dist2).exp();
            }
            *out = acc;
        }
        let total = fd::cumulative_trapezoid(&self.y, &integrand)
            .last()
            .copied()
            .unwrap_or(0.0);
        let norm = (4.0 * std::f64::consts::PI).powf(-(n as f64) / 2.0);
        // both ends continue as (nearly) flat planes beyond the grid
        let x0_norm = x0.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut tail = 0.0;
        for i in [0, self.len() - 1] {
            let rad = (self.radius(i) - x0_norm).max(0.0) / r;
            tail += plane_tail(n, rad);
        }
        if tail > tol {
            return Err(LabError::Truncation {
                estimate: tail,
                tolerance: tol,
            });
        }
        Ok(norm * total / r.powi(n as i32))
    }
}

/// Normalized Gaussian mass of a flat n-plane outside radius `rad`.
fn plane_tail(n: usize, rad: f64) -> f64 {
    use statrs::function::gamma::gamma_ur;
    gamma_ur(n as f64 / 2.0, rad * rad / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{lagrangian_angle_with_tol, AmbientPoint, LagrangianFrame};
    use std::f64::consts::PI;

    #[test]
    fn symmetric_profile_is_half_way_at_zero() {
        let grid = GridSpec { y_max: 1e3, points: 2001, stretch: None };
        let p = lawlor_profile(&[1.0, 1.0, 1.0], &grid).unwrap();
        let mid = grid.points / 2;
        assert!(p.y[mid].abs() < 1e-12);
        for k in 0..3 {
            assert!((p.psi[mid][k] - PI / 6.0).abs() < 1e-10);
            assert!((p.z[mid][k].norm() - 1.0).abs() < 1e-12);
        }
        let last = p.len() - 1;
        for k in 0..3 {
            assert!((p.psi[last][k] - PI / 3.0).abs() < 1e-6);
            assert!(p.psi.windows(2).all(|w| w[1][k] >= w[0][k]));
        }
    }

    #[test]
    fn closed_form_angle_matches_frame_angle() {
        let grid = GridSpec { y_max: 50.0, points: 801, stretch: None };
        let p = lawlor_profile(&[1.0, 2.0, 3.0], &grid).unwrap();
        let dz = p.derivative();
        let angles = profile_angles(&p, &dz);
        let i = 517;
        let x = [0.6, 0.0, 0.8];
        let n = 3;
        let point: Vec<Complex64> = (0..n).map(|k| p.z[i][k] * x[k]).collect();
        let mut vectors = vec![crate::geom::to_real(&(0..n).map(|k| -dz[i][k] * x[k]).collect::<Vec<_>>())];
        // positively oriented complement of x: (x, v2, v3) with det > 0
        let v2 = [0.0, 1.0, 0.0];
        let v3 = [-0.8, 0.0, 0.6];
        for v in [v2, v3] {
            vectors.push(crate::geom::to_real(&(0..n).map(|k| p.z[i][k] * v[k]).collect::<Vec<_>>()));
        }
        let frame = LagrangianFrame::new(AmbientPoint::from_complex(&point), vectors).unwrap();
        let th = lagrangian_angle_with_tol(&frame, 1e-5).unwrap();
        // axes and diagonal agree on a Lawlor neck, so compare with any of them
        let d = (th - angles[0][i]).rem_euclid(2.0 * PI);
        assert!(d.min(2.0 * PI - d) < 1e-5, "{th} vs {}", angles[0][i]);
    }

    #[test]
    fn sphere_rule_total_measure() {
        let (_, w) = sphere_rule(3, 10);
        assert!((w.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-12);
        let (_, w) = sphere_rule(4, 10);
        assert!((w.iter().sum::<f64>() - 2.0 * PI * PI).abs() < 1e-12);
    }
}
