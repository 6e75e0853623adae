//! Flat Calabi–Yau structure on C^n, Lagrangian angles, Gaussian areas and
//! graphicality measurements.
//!
//! Real coordinates are laid out as `[x_1, .., x_n, y_1, .., y_n]` with
//! `z_j = x_j + i y_j`.

mod gaussian;
mod graph;
mod linearize;
pub mod records;

pub use gaussian::{gaussian_area, polyline_gaussian_integral, GaussianArea, GAUSSIAN_TAIL_TOL};
pub(crate) use gaussian::segment_gaussian;
pub use graph::{c_graph_fit, GraphReport, Line, Region};
pub use linearize::{linearize_graph, LinearizationReport, SampleBall};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Default tolerance on the normalized omega-residual of a frame.
pub const LAGRANGIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientStructure {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint(Vec<f64>);

impl AmbientPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(LabError::Parameter(format!(
                "ambient point needs 2n coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(LabError::Parameter("non-finite coordinate".into()));
        }
        Ok(Self(coords))
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![0.0; 2 * n])
    }

    pub fn from_complex(z: &[Complex64]) -> Self {
        Self(to_real(z))
    }

    pub fn dim(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        to_complex(&self.0)
    }
}

/// Real 2n-vector to n complex numbers.
pub fn to_complex(v: &[f64]) -> Vec<Complex64> {
    let n = v.len() / 2;
    (0..n).map(|j| Complex64::new(v[j], v[n + j])).collect()
}

pub fn to_real(z: &[Complex64]) -> Vec<f64> {
    let mut out: Vec<f64> = z.iter().map(|c| c.re).collect();
    out.extend(z.iter().map(|c| c.im));
    out
}

impl AmbientStructure {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::Parameter("dimension must be positive".into()));
        }
        Ok(Self { n })
    }

    /// omega(u, v) = sum_j (u_{x_j} v_{y_j} - u_{y_j} v_{x_j}).
    pub fn omega(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        (0..n).map(|j| u[j] * v[n + j] - u[n + j] * v[j]).sum()
    }

    /// Liouville form at p applied to v.
    pub fn liouville(&self, p: &[f64], v: &[f64]) -> f64 {
        let n = self.n;
        0.5 * (0..n).map(|j| p[j] * v[n + j] - p[n + j] * v[j]).sum::<f64>()
    }

    /// dz_1 ^ .. ^ dz_n evaluated on n real vectors.
    pub fn holomorphic_volume(&self, vectors: &[Vec<f64>]) -> Complex64 {
        let n = self.n;
        assert_eq!(vectors.len(), n);
        let m = DMatrix::from_fn(n, n, |k, j| Complex64::new(vectors[j][k], vectors[j][n + k]));
        m.determinant()
    }

    /// omega^n evaluated on 2n vectors.
    pub fn omega_power(&self, vectors: &[Vec<f64>]) -> f64 {
        let n = self.n;
        assert_eq!(vectors.len(), 2 * n);
        // interleave (x_1, y_1, x_2, y_2, ..) so omega^n / n! is the determinant
        let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let j = r / 2;
            if r % 2 == 0 {
                vectors[c][j]
            } else {
                vectors[c][n + j]
            }
        });
        factorial(n) * m.determinant()
    }

    /// Omega ^ conj(Omega) evaluated on 2n vectors by the shuffle sum.
    pub fn omega_wedge_conj(&self, vectors: &[Vec<f64>]) -> Complex64 {
        let n = self.n;
        assert_eq!(vectors.len(), 2 * n);
        let mut total = Complex64::new(0.0, 0.0);
        for mask in 0u32..(1u32 << (2 * n)) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let (mut first, mut second) = (Vec::new(), Vec::new());
            for (i, v) in vectors.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    first.push(v.clone());
                } else {
                    second.push(v.clone());
                }
            }
            let sign = shuffle_sign(mask, 2 * n);
            let a = self.holomorphic_volume(&first);
            let b = self.holomorphic_volume(&second).conj();
            total += a * b * sign;
        }
        total
    }

    /// The constant c with Omega ^ conj(Omega) = c * omega^n / n!.
    pub fn wedge_constant(&self) -> Complex64 {
        let n = self.n as i32;
        let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, -2.0).powi(n) * sign
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Sign of the permutation listing the set bits of `mask` first, then the rest.
fn shuffle_sign(mask: u32, len: usize) -> f64 {
    let mut inversions = 0;
    let mut unset_seen = 0;
    for i in 0..len {
        if mask & (1 << i) != 0 {
            inversions += unset_seen;
        } else {
            unset_seen += 1;
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Base point plus n tangent vectors of a Lagrangian plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianFrame {
    pub base: AmbientPoint,
    pub vectors: Vec<Vec<f64>>,
}

impl LagrangianFrame {
    pub fn new(base: AmbientPoint, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let n = base.dim();
        if vectors.len() != n || vectors.iter().any(|v| v.len() != 2 * n) {
            return Err(LabError::Parameter(format!(
                "frame needs {n} vectors of length {}",
                2 * n
            )));
        }
        let m = DMatrix::from_fn(2 * n, n, |r, c| vectors[c][r]);
        let sv = m.singular_values();
        let smax = sv.max();
        if !(sv.min() > 1e-12 * smax) {
            return Err(LabError::Parameter("frame vectors are linearly dependent".into()));
        }
        Ok(Self { base, vectors })
    }

    /// Frame of the plane diag(e^{i phi_j}) R^n at the origin.
    pub fn phase_plane(phi: &[f64]) -> Self {
        let n = phi.len();
        let vectors = (0..n)
            .map(|j| {
                let mut v = vec![0.0; 2 * n];
                v[j] = phi[j].cos();
                v[n + j] = phi[j].sin();
                v
            })
            .collect();
        Self {
            base: AmbientPoint::origin(n),
            vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Largest |omega(e_i, e_j)| / (|e_i| |e_j|) over pairs.
    pub fn omega_residual(&self) -> f64 {
        let amb = AmbientStructure { n: self.dim() };
        let mut worst: f64 = 0.0;
        for i in 0..self.vectors.len() {
            for j in i + 1..self.vectors.len() {
                let a = &self.vectors[i];
                let b = &self.vectors[j];
                let na = a.iter().map(|t| t * t).sum::<f64>().sqrt();
                let nb = b.iter().map(|t| t * t).sum::<f64>().sqrt();
                worst = worst.max(amb.omega(a, b).abs() / (na * nb));
            }
        }
        worst
    }

    /// arg Omega on the frame without checking the Lagrangian condition.
    pub fn phase(&self) -> f64 {
        let amb = AmbientStructure { n: self.dim() };
        amb.holomorphic_volume(&self.vectors).arg()
    }
}

/// Lagrangian angle of a frame in the principal branch (-pi, pi].
///
/// Orientation-preserving real changes of basis scale Omega by a positive
/// number, so no orthonormalization is needed for the argument.
pub fn lagrangian_angle(frame: &LagrangianFrame) -> Result<f64> {
    lagrangian_angle_with_tol(frame, LAGRANGIAN_TOL)
}

pub fn lagrangian_angle_with_tol(frame: &LagrangianFrame, tol: f64) -> Result<f64> {
    let residual = frame.omega_residual();
    if residual > tol {
        return Err(LabError::NonLagrangian {
            residual,
            tolerance: tol,
        });
    }
    Ok(frame.phase())
}

/// Lagrangian angle on the branch nearest `reference`.
pub fn lagrangian_angle_near(frame: &LagrangianFrame, reference: f64) -> Result<f64> {
    let theta = lagrangian_angle(frame)?;
    Ok(crate::numerics::fd::nearest_branch(theta, reference))
}

/// Continue angles along a sampled component: unwrap, then shift the whole
/// branch by 2pi k so the sample at `anchor_index` is nearest `anchor_value`.
pub fn continue_branch(angles: &mut [f64], anchor_index: usize, anchor_value: f64) {
    use std::f64::consts::TAU;
    if angles.is_empty() {
        return;
    }
    crate::numerics::fd::unwrap(angles);
    let k = ((angles[anchor_index] - anchor_value) / TAU).round();
    for a in angles.iter_mut() {
        *a -= TAU * k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> impl FnMut() -> f64 {
        let mut s = seed;
        move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        }
    }

    #[test]
    fn real_plane_has_zero_angle() {
        let f = LagrangianFrame::phase_plane(&[0.0, 0.0, 0.0]);
        assert!(lagrangian_angle(&f).unwrap().abs() < 1e-15);
    }

    #[test]
    fn phase_plane_angle_is_phase_sum() {
        let phi = [0.3, 1.1, 2.0];
        let f = LagrangianFrame::phase_plane(&phi);
        let th = lagrangian_angle(&f).unwrap();
        let s: f64 = phi.iter().sum();
        let d = (th - s).rem_euclid(2.0 * PI);
        assert!(d < 1e-12 || (2.0 * PI - d) < 1e-12);
    }

    #[test]
    fn non_lagrangian_frame_rejected() {
        let n = 2;
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        let e2 = vec![0.0, 1.0, 0.1, 0.0];
        let f = LagrangianFrame::new(AmbientPoint::origin(n), vec![e1, e2]).unwrap();
        match lagrangian_angle(&f) {
            Err(LabError::NonLagrangian { residual, .. }) => assert!(residual > 0.09),
            other => panic!("expected error, got {other:?}"),
        }
    }

    #[test]
    fn wedge_identity_on_random_vectors() {
        let mut r = rng(7);
        for n in 1..=3 {
            let amb = AmbientStructure::new(n).unwrap();
            let c = amb.wedge_constant();
            for _ in 0..5 {
                let vs: Vec<Vec<f64>> = (0..2 * n).map(|_| (0..2 * n).map(|_| r()).collect()).collect();
                let lhs = amb.omega_wedge_conj(&vs);
                let rhs = c * amb.omega_power(&vs) / factorial(n);
                assert!((lhs - rhs).norm() < 1e-12, "n={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn liouville_differential_is_omega() {
        let mut r = rng(11);
        let amb = AmbientStructure::new(3).unwrap();
        let h = 1e-3;
        for _ in 0..10_000 {
            let p: Vec<f64> = (0..6).map(|_| 3.0 * r()).collect();
            let u: Vec<f64> = (0..6).map(|_| r()).collect();
            let v: Vec<f64> = (0..6).map(|_| r()).collect();
            let shift = |q: &[f64], d: &[f64], s: f64| -> Vec<f64> {
                q.iter().zip(d).map(|(a, b)| a + s * b).collect()
            };
            let du_lv = (amb.liouville(&shift(&p, &u, h), &v) - amb.liouville(&shift(&p, &u, -h), &v)) / (2.0 * h);
            let dv_lu = (amb.liouville(&shift(&p, &v, h), &u) - amb.liouville(&shift(&p, &v, -h), &u)) / (2.0 * h);
            let dl = du_lv - dv_lu;
            assert!((dl - amb.omega(&u, &v)).abs() < 1e-12);
        }
    }
}
