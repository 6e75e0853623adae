use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Smooth step: 0 for s <= 0, 1 for s >= 1, built from e^{-1/s}.
fn step(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    let sum = a + b;
    let d = a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / (sum * sum);
    (a / sum, d)
}

/// eta(t) and eta'(t): -1 below -2T, 0 on [-T, T], 1 above 2T, |eta'| = O(1/T).
pub fn cutoff(t: f64, big_t: f64) -> (f64, f64) {
    let (v, d) = step((t.abs() - big_t) / big_t);
    (t.signum() * v, d / big_t)
}

/// F(|v|) v / |v| with F(r) = 1 / log(1 + r^2); None at the origin.
pub fn sphere_coordinates(v: &[f64]) -> Option<Vec<f64>> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r == 0.0 {
        return None;
    }
    let f = 1.0 / (r * r).ln_1p();
    Some(v.iter().map(|x| f * x / r).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartEval {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub big_t: f64,
    /// sum x^2 - sum y^2.
    pub t: f64,
    pub eta: f64,
    pub h: f64,
    /// Coefficients of dx_1..dx_n, dy_1..dy_n in lambda + dh.
    pub lambda_tilde: Vec<f64>,
    pub x_tilde: Option<Vec<f64>>,
    pub y_tilde: Option<Vec<f64>>,
}

impl ChartEval {
    /// f + h for a point of L with potential value f.
    pub fn compactified_potential(&self, f: f64) -> f64 {
        f + self.h
    }
}

/// (h, lambda + dh) at adapted coordinates (x, y).
pub(crate) fn modified_liouville(x: &[f64], y: &[f64], big_t: f64) -> (f64, f64, Vec<f64>) {
    let n = x.len();
    let t: f64 = x.iter().map(|v| v * v).sum::<f64>() - y.iter().map(|v| v * v).sum::<f64>();
    let p: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let (eta, deta) = cutoff(t, big_t);
    let mut l = vec![0.0; 2 * n];
    for j in 0..n {
        l[j] = -0.5 * y[j] - 0.5 * (2.0 * deta * x[j] * p + eta * y[j]);
        l[n + j] = 0.5 * x[j] - 0.5 * (-2.0 * deta * y[j] * p + eta * x[j]);
    }
    (eta, -0.5 * eta * p, l)
}

/// Evaluate the compactification chart at z = [Re z, Im z] for the cone Pi_0 u Pi_phi.
pub fn compactify(z: &[f64], phi: &[f64], big_t: f64) -> Result<ChartEval> {
    let n = phi.len();
    if n == 0 || z.len() != 2 * n {
        return Err(LabError::Parameter(format!("point of length {} for n = {n}", z.len())));
    }
    if let Some(p) = phi.iter().find(|p| !(**p > 0.0 && **p < std::f64::consts::PI)) {
        return Err(LabError::Parameter(format!("phase {p} outside (0, pi)")));
    }
    if !(big_t >= 1.0) {
        return Err(LabError::Parameter(format!("T = {big_t} must be >= 1")));
    }
    let y: Vec<f64> = z[n..].to_vec();
    let x: Vec<f64> = (0..n).map(|j| z[j] - y[j] / phi[j].tan()).collect();
    let t = x.iter().map(|v| v * v).sum::<f64>() - y.iter().map(|v| v * v).sum::<f64>();
    let (eta, h, lambda_tilde) = modified_liouville(&x, &y, big_t);
    Ok(ChartEval {
        x_tilde: sphere_coordinates(&x),
        y_tilde: sphere_coordinates(&y),
        x,
        y,
        big_t,
        t,
        eta,
        h,
        lambda_tilde,
    })
}

/// max |d(lambda + dh) - omega| over coefficient pairs, by Richardson-extrapolated
/// central differences at the adapted point (x, y).
pub fn liouville_defect(x: &[f64], y: &[f64], big_t: f64, step: f64) -> f64 {
    let n = x.len();
    let u: Vec<f64> = x.iter().chain(y).cloned().collect();
    let eval = |v: &[f64]| modified_liouville(&v[..n], &v[n..], big_t).2;
    // jac[i][k] = d a_k / d u_i
    let jac: Vec<Vec<f64>> = (0..2 * n)
        .map(|i| {
            let central = |h: f64| -> Vec<f64> {
                let mut up = u.clone();
                let mut dn = u.clone();
                up[i] += h;
                dn[i] -= h;
                let (a, b) = (eval(&up), eval(&dn));
                a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect()
            };
            let (c1, c2) = (central(step), central(0.5 * step));
            c1.iter().zip(&c2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..2 * n {
        for k in i + 1..2 * n {
            let d = jac[i][k] - jac[k][i];
            let target = if k == i + n { 1.0 } else { 0.0 };
            worst = worst.max((d - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cutoff_profile() {
        for t in [-0.5, 0.0, 1.0, 2.0] {
            assert_eq!(cutoff(t, 2.0).0, 0.0);
        }
        assert_eq!(cutoff(4.0, 2.0).0, 1.0);
        assert_eq!(cutoff(-9.0, 2.0).0, -1.0);
        let (e, _) = cutoff(3.0, 2.0);
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exterior_derivative_is_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let big_t = 2.0;
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.5..2.5)).collect();
            let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.5..2.5)).collect();
            let d = liouville_defect(&x, &y, big_t, 1e-4);
            assert!(d < 1e-8, "{d} at {x:?} {y:?}");
        }
    }

    #[test]
    fn inner_band_is_untouched() {
        let z = [0.3, -0.2, 0.1, 0.4];
        let c = compactify(&z, &[1.0, 2.0], 1.0).unwrap();
        assert_eq!(c.h, 0.0);
        assert!((c.lambda_tilde[0] + 0.5 * c.y[0]).abs() < 1e-16);
        assert!(compactify(&z, &[0.0, 2.0], 1.0).is_err());
        let far = sphere_coordinates(&[1e8, 0.0]).unwrap();
        assert!(far[0] < 0.03);
    }
}
