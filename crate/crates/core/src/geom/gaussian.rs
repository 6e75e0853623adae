use statrs::function::erf::{erf, erfc};

use super::AmbientPoint;
use crate::error::{LabError, Result};

/// Truncation budget for Gaussian areas.
pub const GAUSSIAN_TAIL_TOL: f64 = 1e-12;

/// Sampled Lagrangians that carry an area measure.
pub trait GaussianArea {
    /// Real dimension of the Lagrangian.
    fn dimension(&self) -> usize;

    /// Theta(r^{-1}(L - x0)) with truncation budget `tol`.
    fn gaussian_area_with_tol(&self, x0: &[f64], r: f64, tol: f64) -> Result<f64>;
}

/// Theta(L, x0, r) = (4 pi)^{-n/2} int_{r^{-1}(L - x0)} e^{-|x|^2/4}.
pub fn gaussian_area<L: GaussianArea + ?Sized>(l: &L, x0: &AmbientPoint, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(LabError::Parameter(format!("scale must be positive, got {r}")));
    }
    l.gaussian_area_with_tol(x0.coords(), r, GAUSSIAN_TAIL_TOL)
}

/// int e^{-|x|^2/4} ds along one straight segment, exactly.
pub(crate) fn segment_gaussian(p: &[f64], q: &[f64]) -> f64 {
    let mut dd = 0.0;
    let mut pu = 0.0;
    let mut pp = 0.0;
    for k in 0..p.len() {
        let d = q[k] - p[k];
        dd += d * d;
        pu += p[k] * d;
        pp += p[k] * p[k];
    }
    let len = dd.sqrt();
    if len == 0.0 {
        return 0.0;
    }
    let pu = pu / len;
    let b2 = (pp - pu * pu).max(0.0);
    // s runs over [pu, pu + len] measured from the foot of the perpendicular
    let a = 0.5 * pu;
    let b = 0.5 * (pu + len);
    let diff = if a >= 0.0 {
        erfc(a) - erfc(b)
    } else if b <= 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        erf(b) - erf(a)
    };
    (-0.25 * b2).exp() * std::f64::consts::PI.sqrt() * diff
}

/// Unnormalized Gaussian integral of a polyline after the map
/// p -> (p - x0)/r, together with a tail estimate for open ends.
pub fn polyline_gaussian_integral<P: AsRef<[f64]>>(
    points: &[P],
    closed: bool,
    x0: &[f64],
    r: f64,
) -> (f64, f64) {
    let m = x0.len();
    let map = |p: &P| -> Vec<f64> { (0..m).map(|k| (p.as_ref()[k] - x0[k]) / r).collect() };
    let pts: Vec<Vec<f64>> = points.iter().map(map).collect();
    let mut total = 0.0;
    for w in pts.windows(2) {
        total += segment_gaussian(&w[0], &w[1]);
    }
    let mut tail = 0.0;
    if closed && pts.len() > 1 {
        total += segment_gaussian(&pts[pts.len() - 1], &pts[0]);
    } else if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        for e in [first, last] {
            let rad = e.iter().map(|t| t * t).sum::<f64>().sqrt();
            tail += std::f64::consts::PI.sqrt() * erfc(0.5 * rad);
        }
    }
    (total, tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_matches_dense_quadrature() {
        let p = [0.3, -1.2];
        let q = [2.5, 0.7];
        let exact = segment_gaussian(&p, &q);
        let m = 200_000;
        let mut s = 0.0;
        let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        for i in 0..m {
            let t = (i as f64 + 0.5) / m as f64;
            let x = p[0] + t * (q[0] - p[0]);
            let y = p[1] + t * (q[1] - p[1]);
            s += (-(x * x + y * y) / 4.0).exp();
        }
        s *= len / m as f64;
        assert!((exact - s).abs() < 1e-9);
    }

    #[test]
    fn far_segment_has_no_cancellation() {
        let v = segment_gaussian(&[20.0, 0.0], &[30.0, 0.0]);
        assert!(v > 0.0 && v < 1e-40);
    }
}
