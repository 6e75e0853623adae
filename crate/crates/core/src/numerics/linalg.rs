//! Banded solvers and small least-squares fits.

/// Solve a tridiagonal system in place (Thomas algorithm).
///
/// `lower[i]` multiplies x[i-1], `upper[i]` multiplies x[i+1] in row i;
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Solve a cyclic tridiagonal system: row 0 couples to x[n-1] through
/// `lower[0]`, row n-1 couples to x[0] through `upper[n-1]`.
pub fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    assert!(n >= 3);
    // Sherman–Morrison with u = (gamma, 0, .., 0, upper[n-1]), v = (1, 0, .., 0, lower[0]/gamma)
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= upper[n - 1] * lower[0] / gamma;
    let mut x = rhs.to_vec();
    solve_tridiagonal(lower, &d, upper, &mut x);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = upper[n - 1];
    solve_tridiagonal(lower, &d, upper, &mut u);
    let fact = (x[0] + lower[0] * x[n - 1] / gamma) / (1.0 + u[0] + lower[0] * u[n - 1] / gamma);
    for i in 0..n {
        rhs[i] = x[i] - fact * u[i];
    }
}

/// Ordinary least-squares line y = intercept + slope x.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    LineFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    }
}

/// Log-log slope of errors against step sizes (observed convergence order).
pub fn observed_order(h: &[f64], err: &[f64]) -> f64 {
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly).slope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_dense() {
        let lower = [0.0, 1.0, -0.5, 0.25];
        let diag = [4.0, 5.0, 3.0, 6.0];
        let upper = [1.0, 2.0, 0.5, 0.0];
        let x = [1.0, -2.0, 3.0, 0.5];
        let mut b = [0.0; 4];
        for i in 0..4 {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += lower[i] * x[i - 1];
            }
            if i < 3 {
                b[i] += upper[i] * x[i + 1];
            }
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut b);
        for i in 0..4 {
            assert!((b[i] - x[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn cyclic_matches_dense() {
        let n = 6;
        let lower: Vec<f64> = (0..n).map(|i| -1.0 - 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| -0.7 + 0.05 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 4.0 + i as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.3).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = diag[i] * x[i] + lower[i] * x[(i + n - 1) % n] + upper[i] * x[(i + 1) % n];
        }
        solve_cyclic_tridiagonal(&lower, &diag, &upper, &mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-13, "{i}: {} vs {}", b[i], x[i]);
        }
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| 2.0 - 0.5 * t).collect();
        let f = fit_line(&x, &y);
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!(f.residual < 1e-14);
    }
}
