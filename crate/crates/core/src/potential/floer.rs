use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cone::PlaneComponent;
use crate::error::{LabError, Result};

/// Smallest characteristic angle (distance to 0 or pi) accepted as transverse.
pub const TRANSVERSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionDatum {
    pub point: Vec<f64>,
    /// Characteristic angles in (0, pi), ascending.
    pub alpha: Vec<f64>,
    pub theta_l: f64,
    pub theta_l2: f64,
    pub mu: f64,
    /// (theta_L - theta_L')/pi and that plus n.
    pub bounds: [f64; 2],
    pub strict: bool,
    /// |mu - round(mu)|.
    pub integrality: f64,
}

/// Floer degree (sum alpha_i + theta_L - theta_L')/pi at a transverse
/// intersection of the planes L and L'.
///
/// With U, U' unitary frames, S = (U* U')(U* U')^T is symmetric unitary with
/// eigenvalues e^{2 i alpha_j}; its real and imaginary parts commute and are
/// diagonalized together.
pub fn floer_degree(l: &PlaneComponent, l2: &PlaneComponent, point: Vec<f64>) -> Result<IntersectionDatum> {
    l.validate()?;
    l2.validate()?;
    let n = l.n();
    if l2.n() != n {
        return Err(LabError::Parameter("planes of different dimension".into()));
    }
    let m = l.matrix().adjoint() * l2.matrix();
    let s = &m * m.transpose();
    let re = DMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)].re + s[(j, i)].re));
    let im = DMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)].im + s[(j, i)].im));
    // a generic combination separates the joint eigenspaces
    let mix = std::f64::consts::FRAC_1_SQRT_2 * 0.917;
    let eig = SymmetricEigen::new(&re + &im * mix);
    let mut alpha = Vec::with_capacity(n);
    for k in 0..n {
        let v = eig.eigenvectors.column(k);
        let vr = (v.transpose() * &re * v)[(0, 0)];
        let vi = (v.transpose() * &im * v)[(0, 0)];
        let z = Complex64::new(vr, vi);
        let mut two_alpha = z.arg();
        if two_alpha <= 0.0 {
            two_alpha += std::f64::consts::TAU;
        }
        let a = 0.5 * two_alpha;
        let gap = a.min(std::f64::consts::PI - a);
        if gap < TRANSVERSE_TOL || (z - Complex64::new(1.0, 0.0)).norm() < 2.0 * TRANSVERSE_TOL {
            return Err(LabError::NotTransverse { angle: gap });
        }
        alpha.push(a);
    }
    alpha.sort_by(f64::total_cmp);
    let pi = std::f64::consts::PI;
    let mu = (alpha.iter().sum::<f64>() + l.grading - l2.grading) / pi;
    let lower = (l.grading - l2.grading) / pi;
    let bounds = [lower, lower + n as f64];
    Ok(IntersectionDatum {
        point,
        strict: bounds[0] < mu && mu < bounds[1],
        integrality: (mu - mu.round()).abs(),
        alpha,
        theta_l: l.grading,
        theta_l2: l2.grading,
        mu,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_pair_and_reverse() {
        let phi = [0.4, 1.1, std::f64::consts::PI - 1.5];
        let p0 = PlaneComponent::diagonal(&[0.0; 3], 0);
        let pp = PlaneComponent::diagonal(&phi, 1);
        let d = floer_degree(&p0, &pp, vec![0.0; 6]).unwrap();
        assert!(d.mu.abs() < 1e-12);
        let mut sorted = phi.to_vec();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in d.alpha.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = floer_degree(&pp, &p0, vec![0.0; 6]).unwrap();
        assert!((r.mu - 3.0).abs() < 1e-12);
        assert!(d.strict && r.strict);
    }

    #[test]
    fn coincident_planes_are_rejected() {
        let p = PlaneComponent::diagonal(&[0.3, 0.2], 0);
        assert!(matches!(floer_degree(&p, &p, vec![0.0; 4]), Err(LabError::NotTransverse { .. })));
    }
}
