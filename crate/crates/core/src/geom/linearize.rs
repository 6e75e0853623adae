use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AmbientStructure;
use crate::error::{LabError, Result};

/// Uniform sample grid of a ball in R^n (the base plane R^n of C^n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBall {
    pub n: usize,
    pub radius: f64,
    /// Points per axis.
    pub per_axis: usize,
}

impl SampleBall {
    pub fn points(&self) -> Vec<Vec<f64>> {
        let m = self.per_axis.max(2);
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.n];
        loop {
            let p: Vec<f64> = idx
                .iter()
                .map(|&i| -self.radius + 2.0 * self.radius * i as f64 / (m - 1) as f64)
                .collect();
            if p.iter().map(|t| t * t).sum::<f64>() <= self.radius * self.radius {
                out.push(p);
            }
            let mut k = 0;
            loop {
                if k == self.n {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearizationReport {
    /// sup |omega pulled back to L minus d eta|.
    pub closedness_residual: f64,
    /// sup |theta_L - theta_W - d^* eta|.
    pub angle_residual: f64,
    /// sup (|eta| + |D eta|) over the samples.
    pub slope: f64,
}

/// Default small-slope threshold for graph linearization.
pub const SLOPE_THRESHOLD: f64 = 0.5;

/// Compare the geometry of L = graph of eta over R^n with its linearization.
///
/// The graph of a 1-form eta is L = {x - i eta^sharp(x)}, so that eta is the
/// contraction of omega with the normal displacement; with d^* = -div this
/// makes theta_L = d^* eta to first order.
pub fn linearize_graph<F>(eta: F, region: &SampleBall) -> Result<LinearizationReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = region.n;
    let amb = AmbientStructure::new(n)?;
    let h = 1e-5 * region.radius.max(1.0);
    let mut report = LinearizationReport {
        closedness_residual: 0.0,
        angle_residual: 0.0,
        slope: 0.0,
    };
    for x in region.points() {
        let e = eta(&x);
        // jac[k][j] = d eta_k / d x_j
        let mut jac = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let ep = eta(&xp);
            let em = eta(&xm);
            for k in 0..n {
                jac[k][j] = (ep[k] - em[k]) / (2.0 * h);
            }
        }
        let mag = e.iter().map(|t| t * t).sum::<f64>().sqrt()
            + jac.iter().flatten().map(|t| t * t).sum::<f64>().sqrt();
        report.slope = report.slope.max(mag);

        // tangent vectors of the embedding x -> x - i eta(x)
        let tangents: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut v = vec![0.0; 2 * n];
                v[j] = 1.0;
                for k in 0..n {
                    v[n + k] = -jac[k][j];
                }
                v
            })
            .collect();
        for a in 0..n {
            for b in a + 1..n {
                let pulled = amb.omega(&tangents[a], &tangents[b]);
                let d_eta = jac[b][a] - jac[a][b];
                report.closedness_residual = report.closedness_residual.max((pulled - d_eta).abs());
            }
        }
        let m = DMatrix::from_fn(n, n, |k, j| Complex64::new(tangents[j][k], tangents[j][n + k]));
        let theta = m.determinant().arg();
        let div: f64 = (0..n).map(|k| jac[k][k]).sum();
        report.angle_residual = report.angle_residual.max((theta + div).abs());
    }
    if report.slope > SLOPE_THRESHOLD {
        return Err(LabError::SlopeThreshold {
            slope: report.slope,
            threshold: SLOPE_THRESHOLD,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_form_has_zero_residuals() {
        let b = SampleBall { n: 2, radius: 1.0, per_axis: 9 };
        let r = linearize_graph(|_| vec![0.0, 0.0], &b).unwrap();
        assert_eq!(r.closedness_residual, 0.0);
        assert_eq!(r.angle_residual, 0.0);
    }

    #[test]
    fn constant_laplacian_gives_minus_eps_c() {
        // f = c|x|^2/(2n) has Laplacian c; the angle at the origin is -n atan(eps c / n)
        let (n, c, eps) = (3usize, 2.0, 1e-3);
        let b = SampleBall { n, radius: 0.5, per_axis: 5 };
        let eta = move |x: &[f64]| x.iter().map(|t| eps * c * t / n as f64).collect::<Vec<_>>();
        let r = linearize_graph(eta, &b).unwrap();
        let theta = -(n as f64) * (eps * c / n as f64).atan();
        assert!((theta + eps * c).abs() < 1e-8);
        assert!((r.angle_residual - (theta + eps * c).abs()).abs() < 1e-9);
    }

    #[test]
    fn steep_graph_rejected() {
        let b = SampleBall { n: 2, radius: 1.0, per_axis: 5 };
        let r = linearize_graph(|x: &[f64]| vec![x[0], x[1]], &b);
        assert!(matches!(r, Err(LabError::SlopeThreshold { .. })));
    }
}
