use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Chebyshev collocation for the weighted radial operator
///
/// R'' + ((n-1)/r - r/2) R' - mu/r^2 R = lambda R on (0, r_max],
///
/// with R(r_max) = 0, and R(0) = 0 (mu > 0) or R'(0) = 0 (mu = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSolver {
    pub r_max: f64,
    pub nodes: usize,
}

impl Default for RadialSolver {
    fn default() -> Self {
        Self {
            r_max: 12.0,
            nodes: 72,
        }
    }
}

/// Chebyshev points on [0, L] (ascending) and the first-derivative matrix.
fn cheb(m: usize, len: f64) -> (Vec<f64>, DMatrix<f64>) {
    use std::f64::consts::PI;
    let x: Vec<f64> = (0..=m).map(|j| (PI * j as f64 / m as f64).cos()).collect();
    let c = |j: usize| -> f64 {
        let base = if j == 0 || j == m { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::<f64>::zeros(m + 1, m + 1);
    for i in 0..=m {
        for j in 0..=m {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=m {
        let s: f64 = (0..=m).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    // map x in [-1, 1] (descending) to r = L (1 - x) / 2 (ascending)
    let r: Vec<f64> = x.iter().map(|t| 0.5 * len * (1.0 - t)).collect();
    let d = d * (-2.0 / len);
    (r, d)
}

impl RadialSolver {
    /// Largest eigenvalue for link eigenvalue `mu` in dimension `n`.
    pub fn top_eigenvalue(&self, mu: f64, n: usize) -> Result<f64> {
        let m = self.nodes;
        if m < 8 || !(self.r_max > 0.0) {
            return Err(LabError::Parameter("radial solver needs >= 8 nodes and r_max > 0".into()));
        }
        let (r, d1) = cheb(m, self.r_max);
        let d2 = &d1 * &d1;
        let nn = n as f64;
        // operator rows at every node
        let op = DMatrix::from_fn(m + 1, m + 1, |i, j| {
            let ri = r[i];
            if i == 0 {
                return 0.0;
            }
            let mut v = d2[(i, j)] + ((nn - 1.0) / ri - ri / 2.0) * d1[(i, j)];
            if i == j {
                v -= mu / (ri * ri);
            }
            v
        });
        let interior: Vec<usize> = (1..m).collect();
        let a = if mu > 0.0 {
            // R(0) = R(L) = 0: drop both boundary unknowns
            DMatrix::from_fn(interior.len(), interior.len(), |i, j| op[(interior[i], interior[j])])
        } else {
            // R'(0) = 0 gives R_0 = -sum_j D(0,j) R_j / D(0,0)
            let k = interior.len();
            let c0 = d1[(0, 0)];
            DMatrix::from_fn(k, k, |p, q| {
                let (i, j) = (interior[p], interior[q]);
                op[(i, j)] - op[(i, 0)] * d1[(0, j)] / c0
            })
        };
        let eig = a.complex_eigenvalues();
        let best = eig
            .iter()
            .filter(|z| z.im.abs() < 1e-8 * (1.0 + z.re.abs()))
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if !best.is_finite() {
            return Err(LabError::Quadrature {
                estimate: f64::INFINITY,
                tolerance: 0.0,
            });
        }
        Ok(best)
    }
}

/// Independent cross-check of the drift eigenvalue of a degree-d mode.
pub fn radial_drift_eigenvalue(d: f64, n: usize) -> Result<f64> {
    let mu = d * (d + n as f64 - 2.0);
    RadialSolver::default().top_eigenvalue(mu, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_minus_half_degree_on_planes() {
        for n in 2..=4 {
            for d in 0..=4 {
                let lam = radial_drift_eigenvalue(d as f64, n).unwrap();
                assert!((lam + d as f64 / 2.0).abs() < 1e-6, "n={n} d={d} lam={lam}");
            }
        }
    }
}
