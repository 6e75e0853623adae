//! Finite differences and quadrature on sampled, possibly nonuniform grids.

/// Centered three-point derivative on a nonuniform grid; one-sided
/// second-order stencils at the ends.
pub fn derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, f.len());
    assert!(n >= 3, "need at least three samples");
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = three_point(x[i - 1], x[i], x[i + 1], f[i - 1], f[i], f[i + 1], x[i]);
    }
    d[0] = three_point(x[0], x[1], x[2], f[0], f[1], f[2], x[0]);
    d[n - 1] = three_point(
        x[n - 3],
        x[n - 2],
        x[n - 1],
        f[n - 3],
        f[n - 2],
        f[n - 1],
        x[n - 1],
    );
    d
}

/// Derivative at `t` of the quadratic through three points.
#[inline]
pub fn three_point(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64, t: f64) -> f64 {
    let l0 = ((t - x1) + (t - x2)) / ((x0 - x1) * (x0 - x2));
    let l1 = ((t - x0) + (t - x2)) / ((x1 - x0) * (x1 - x2));
    let l2 = ((t - x0) + (t - x1)) / ((x2 - x0) * (x2 - x1));
    f0 * l0 + f1 * l1 + f2 * l2
}

/// Second derivative of the quadratic through three points.
#[inline]
pub fn three_point_second(x0: f64, x1: f64, x2: f64, f0: f64, f1: f64, f2: f64) -> f64 {
    2.0 * (f0 / ((x0 - x1) * (x0 - x2)) + f1 / ((x1 - x0) * (x1 - x2)) + f2 / ((x2 - x0) * (x2 - x1)))
}

/// Cumulative trapezoid integral, starting from 0 at x[0].
pub fn cumulative_trapezoid(x: &[f64], f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
        out.push(acc);
    }
    out
}

/// Finite-difference weights for derivatives 0..=order at `t` from the
/// nodes `x` (Fornberg's recursion). Returns `w[m][j]`.
pub fn fornberg_weights(t: f64, x: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - t;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - t;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Fourth-order derivative from five-point stencils (shifted at the ends).
pub fn derivative5(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, f.len());
    assert!(n >= 5, "need at least five samples");
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2).min(n - 5);
            let w = fornberg_weights(x[i], &x[lo..lo + 5], 1);
            (0..5).map(|j| w[1][j] * f[lo + j]).sum()
        })
        .collect()
}

/// Cumulative integral of the piecewise cubic through four neighbouring
/// samples, starting from 0 at x[0]. Fourth order on smooth grids.
pub fn cumulative_cubic(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, f.len());
    if n < 4 {
        return cumulative_trapezoid(x, f);
    }
    let g = 0.5 / 3f64.sqrt();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..n - 1 {
        let lo = i.saturating_sub(1).min(n - 4);
        let (a, b) = (x[i], x[i + 1]);
        let mid = 0.5 * (a + b);
        let h = b - a;
        let mut seg = 0.0;
        for t in [mid - g * h, mid + g * h] {
            let w = fornberg_weights(t, &x[lo..lo + 4], 0);
            seg += (0..4).map(|j| w[0][j] * f[lo + j]).sum::<f64>();
        }
        acc += 0.5 * h * seg;
        out.push(acc);
    }
    out
}

/// Unwrap a sequence of angles so consecutive jumps are below pi.
pub fn unwrap(angles: &mut [f64]) {
    use std::f64::consts::{PI, TAU};
    for i in 1..angles.len() {
        let mut d = angles[i] - angles[i - 1];
        while d > PI {
            d -= TAU;
        }
        while d < -PI {
            d += TAU;
        }
        angles[i] = angles[i - 1] + d;
    }
}

/// Shift `angle` by a multiple of 2pi to land nearest `reference`.
pub fn nearest_branch(angle: f64, reference: f64) -> f64 {
    use std::f64::consts::TAU;
    angle - TAU * ((angle - reference) / TAU).round()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_order_rules_are_exact_for_low_degree() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.2).sinh()).collect();
        let f: Vec<f64> = x.iter().map(|t| t * t * t - 2.0 * t).collect();
        let d = derivative5(&x, &f);
        let i = cumulative_cubic(&x, &f);
        for k in 0..x.len() {
            let t = x[k];
            assert!((d[k] - (3.0 * t * t - 2.0)).abs() < 1e-9 * (1.0 + t * t));
            let exact = t.powi(4) / 4.0 - t * t;
            assert!((i[k] - exact).abs() < 1e-9 * (1.0 + t.powi(4)));
        }
    }

    #[test]
    fn derivative_exact_for_quadratics_on_nonuniform_grid() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.3).exp()).collect();
        let f: Vec<f64> = x.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let d = derivative(&x, &f);
        for (t, dv) in x.iter().zip(&d) {
            assert!((dv - (6.0 * t - 1.0)).abs() < 1e-9 * (1.0 + t.abs()));
        }
    }

    #[test]
    fn unwrap_removes_jumps() {
        let mut a = vec![3.0, -3.0, 3.1];
        unwrap(&mut a);
        assert!((a[1] - (-3.0 + std::f64::consts::TAU)).abs() < 1e-15);
        assert!((a[2] - 3.1).abs() < 1e-15);
    }
}
