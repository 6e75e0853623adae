//! Orthonormal drift eigenfunctions on R^n for the weight
//! (4 pi)^{-n/2} e^{-|x|^2/4}: phi_alpha(x) = prod_i He_{alpha_i}(x_i / sqrt 2) / sqrt(alpha_i!).

/// Probabilists' Hermite polynomials He_0..He_kmax at u.
pub fn hermite_table(kmax: usize, u: f64) -> Vec<f64> {
    let mut h = vec![0.0; kmax + 1];
    h[0] = 1.0;
    if kmax >= 1 {
        h[1] = u;
    }
    for k in 1..kmax {
        h[k + 1] = u * h[k] - k as f64 * h[k - 1];
    }
    h
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Multi-indices of total degree exactly `degree` in `n` variables, in
/// lexicographic order.
pub fn multi_indices(n: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let n = cur.len();
        if i + 1 == n {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    if n == 0 {
        return out;
    }
    rec(0, degree, &mut cur, &mut out);
    out
}

/// One-variable factor He_a(x / sqrt 2) / sqrt(a!) and its derivatives.
///
/// d/dx He_a(x/sqrt 2) = a He_{a-1}(x / sqrt 2) / sqrt 2.
pub fn factor_derivative(a: usize, order: usize, x: f64) -> f64 {
    if order > a {
        return 0.0;
    }
    let u = x / std::f64::consts::SQRT_2;
    let h = hermite_table(a - order, u);
    let falling: f64 = (a - order + 1..=a).map(|i| i as f64).product();
    falling * std::f64::consts::FRAC_1_SQRT_2.powi(order as i32) * h[a - order] / factorial(a).sqrt()
}

/// Mixed partial derivative d^beta phi_alpha at x.
pub fn basis_derivative(alpha: &[usize], beta: &[usize], x: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(beta)
        .zip(x)
        .map(|((&a, &b), &t)| factor_derivative(a, b, t))
        .product()
}

/// Normalization of the 1-form d phi_alpha: its Gaussian L^2 norm is sqrt(|alpha| / 2).
pub fn form_scale(alpha: &[usize]) -> f64 {
    (alpha.iter().sum::<usize>() as f64 / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::gauss_hermite;

    #[test]
    fn orthonormal_in_gaussian_weight() {
        // (4 pi)^{-1/2} int f(x) e^{-x^2/4} dx = pi^{-1/2} int f(2u) e^{-u^2} du
        let (u, w) = gauss_hermite(20);
        for a in 0..8 {
            for b in 0..8 {
                let ip: f64 = u
                    .iter()
                    .zip(&w)
                    .map(|(t, wt)| wt * factor_derivative(a, 0, 2.0 * t) * factor_derivative(b, 0, 2.0 * t))
                    .sum::<f64>()
                    / std::f64::consts::PI.sqrt();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12, "{a} {b} {ip}");
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(multi_indices(3, 2).len(), 6);
        assert_eq!(multi_indices(2, 5).len(), 6);
    }
}
