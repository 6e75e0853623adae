//! Lawlor necks: parameter maps, sampled profiles, special-Lagrangian
//! residuals, potentials and far-field fits.

mod potential;
mod profile;

pub use potential::{asymptotic_fit, neck_potential, AsymptoticFit, EndLabel, NeckPotential};
pub use profile::{
    lawlor_profile, special_residual, GridSpec, ProfileLagrangian, ProfileMeta, SpecialResidual,
};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numerics::quad;

/// Absolute tolerance for each improper integral of the forward map.
pub const FORWARD_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawlorParams {
    pub a: Vec<f64>,
    pub phi: Vec<f64>,
    #[serde(rename = "A")]
    pub area: f64,
    /// Largest quadrature error estimate among the n + 1 integrals.
    pub quad_error: f64,
}

impl LawlorParams {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn phase_sum(&self) -> f64 {
        self.phi.iter().sum()
    }
}

/// Elementary symmetric polynomials e_1..e_n of `a`.
fn elementary_symmetric(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for &ak in a {
        for k in (1..=n).rev() {
            e[k] += ak * e[k - 1];
        }
    }
    e
}

/// The neck integrands after x = tan s.
///
/// With P(x) = sum_k e_k x^{2k-2} and Q(s) = cos^{2n-2}(s) P(tan s), every
/// integrand becomes a bounded smooth function on [-pi/2, pi/2].
#[derive(Debug, Clone)]
pub(crate) struct NeckIntegrand {
    a: Vec<f64>,
    e: Vec<f64>,
}

impl NeckIntegrand {
    pub(crate) fn new(a: &[f64]) -> Self {
        Self {
            a: a.to_vec(),
            e: elementary_symmetric(a),
        }
    }

    fn n(&self) -> usize {
        self.a.len()
    }

    /// Q(s) = sum_k e_k sin^{2k-2} s cos^{2n-2k} s.
    fn q(&self, s: f64) -> f64 {
        let n = self.n();
        let (sn, cs) = s.sin_cos();
        let (s2, c2) = (sn * sn, cs * cs);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += self.e[k] * s2.powi(k as i32 - 1) * c2.powi((n - k) as i32);
        }
        acc
    }

    /// Integrand of phi_k in the s variable.
    pub(crate) fn phi_density(&self, k: usize, s: f64) -> f64 {
        let n = self.n();
        let (sn, cs) = s.sin_cos();
        let ak = self.a[k];
        ak * cs.abs().powi(n as i32 - 1) / ((cs * cs + ak * sn * sn) * self.q(s).sqrt())
    }

    /// Integrand of A in the s variable.
    pub(crate) fn area_density(&self, s: f64) -> f64 {
        let n = self.n();
        0.5 * s.cos().abs().powi(n as i32 - 3) / self.q(s).sqrt()
    }

    /// P(y) = p(y)/y^2 evaluated without cancellation.
    #[cfg(test)]
    pub(crate) fn p_over_x2(&self, y: f64) -> f64 {
        let y2 = y * y;
        let mut acc = 0.0;
        for k in (1..=self.n()).rev() {
            acc = acc * y2 + self.e[k];
        }
        acc
    }
}

fn validate_a(a: &[f64]) -> Result<()> {
    if a.len() < 3 {
        return Err(LabError::Parameter(format!(
            "Lawlor necks need n >= 3, got n = {}",
            a.len()
        )));
    }
    if let Some(bad) = a.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(LabError::Parameter(format!("a_k must be positive and finite, got {bad}")));
    }
    Ok(())
}

/// phi_k(a) and A(a) by adaptive Gauss–Kronrod on [-pi/2, pi/2].
pub fn lawlor_forward(a: &[f64]) -> Result<LawlorParams> {
    lawlor_forward_tol(a, FORWARD_TOL)
}

pub fn lawlor_forward_tol(a: &[f64], tol: f64) -> Result<LawlorParams> {
    validate_a(a)?;
    let g = NeckIntegrand::new(a);
    let h = std::f64::consts::FRAC_PI_2;
    let mut phi = Vec::with_capacity(a.len());
    let mut worst: f64 = 0.0;
    for k in 0..a.len() {
        let r = quad::integrate(|s| g.phi_density(k, s), -h, h, tol, MAX_PANELS)?;
        worst = worst.max(r.error);
        phi.push(r.value);
    }
    let r = quad::integrate(|s| g.area_density(s), -h, h, tol, MAX_PANELS)?;
    worst = worst.max(r.error);
    Ok(LawlorParams {
        a: a.to_vec(),
        phi,
        area: r.value,
        quad_error: worst,
    })
}

/// Tolerance on the phase sum accepted by [`lawlor_inverse`].
pub const PHASE_SUM_TOL: f64 = 1e-6;

/// Recover a from (phi, A).
///
/// Damped Newton in log a for (phi_1..phi_{n-1}, log A) at A = 1, then the
/// exact rescaling a -> a / A.
pub fn lawlor_inverse(phi: &[f64], area: f64) -> Result<Vec<f64>> {
    use std::f64::consts::PI;
    let n = phi.len();
    if n < 3 {
        return Err(LabError::Parameter(format!("Lawlor necks need n >= 3, got n = {n}")));
    }
    if let Some(bad) = phi.iter().find(|p| !(**p > 0.0 && **p < PI)) {
        return Err(LabError::Parameter(format!("phases must lie in (0, pi), got {bad}")));
    }
    if !(area > 0.0) || !area.is_finite() {
        return Err(LabError::Parameter(format!("A must be positive, got {area}")));
    }
    let sum: f64 = phi.iter().sum();
    if (sum - PI).abs() > PHASE_SUM_TOL {
        return Err(LabError::PhaseSum { sum });
    }

    let residual = |w: &[f64]| -> Result<Vec<f64>> {
        let a: Vec<f64> = w.iter().map(|v| v.exp()).collect();
        let p = lawlor_forward_tol(&a, 1e-13)?;
        let mut r: Vec<f64> = (0..n - 1).map(|k| p.phi[k] - phi[k]).collect();
        r.push(p.area.ln());
        Ok(r)
    };
    let norm = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>().sqrt();

    // phases grow with a_k; tan^2(phi/2) is exact on the symmetric neck up to scale
    let base = (PI / (2.0 * n as f64)).tan();
    let mut w: Vec<f64> = phi.iter().map(|p| 2.0 * ((p / 2.0).tan() / base).ln()).collect();
    let mut r = residual(&w)?;
    let mut rn = norm(&r);
    let max_iter = 60;
    let step = 1e-6;
    for iter in 0..max_iter {
        if rn < 1e-12 {
            break;
        }
        let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += step;
            wm[j] -= step;
            let rp = residual(&wp)?;
            let rm = residual(&wm)?;
            for i in 0..n {
                jac[(i, j)] = (rp[i] - rm[i]) / (2.0 * step);
            }
        }
        let rhs = nalgebra::DVector::from_iterator(n, r.iter().map(|v| -v));
        let Some(dw) = jac.lu().solve(&rhs) else {
            return Err(LabError::NewtonStagnation {
                iterations: iter,
                residual: rn,
                iterate: w.iter().map(|v| v.exp()).collect(),
            });
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> = w.iter().zip(dw.iter()).map(|(a, b)| a + t * b).collect();
            if let Ok(rt) = residual(&trial) {
                let tn = norm(&rt);
                if tn < (1.0 - 1e-4 * t) * rn {
                    w = trial;
                    r = rt;
                    rn = tn;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if rn > 1e-10 {
        return Err(LabError::NewtonStagnation {
            iterations: max_iter,
            residual: rn,
            iterate: w.iter().map(|v| v.exp()).collect(),
        });
    }
    // A(lambda^{-2} a) = lambda^2 A(a) and A(a) = 1 here
    Ok(w.iter().map(|v| v.exp() / area).collect())
}
