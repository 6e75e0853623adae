use serde::{Deserialize, Serialize};

use super::hermite::{factor_derivative, form_scale, multi_indices};
use super::{LogModeRate, Mode, ModeExpansion};
use crate::cone::PlaneUnionCone;
use crate::error::{LabError, Result};
use crate::numerics::quad::gauss_hermite;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpandOptions {
    /// Truncation degree D_max.
    pub d_max: usize,
    /// Largest accepted tail energy, relative to max(1, ||eta||^2).
    pub tail_tol: f64,
    /// Gauss–Hermite points per axis; 0 picks d_max + 8.
    pub quad_points: usize,
    pub log_rate: LogModeRate,
    /// Bound on |x|^{1.1} |eta| near the origin relative to its value on the unit sphere.
    pub singular_bound: f64,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        Self {
            d_max: 12,
            tail_tol: 1e-8,
            quad_points: 0,
            log_rate: LogModeRate::Full,
            singular_bound: 1e2,
        }
    }
}

fn directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    // quasi-uniform directions from a Halton-type sequence mapped through normals
    let primes = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    let mut out = Vec::with_capacity(count);
    for i in 1..=count {
        let v: Vec<f64> = (0..n)
            .map(|k| {
                let b = primes[k % primes.len()];
                let (mut f, mut r, mut j) = (1.0, 0.0, i as f64);
                while j > 0.0 {
                    f /= b;
                    r += f * (j % b);
                    j = (j / b).floor();
                }
                (2.0 * std::f64::consts::PI * r).cos() + 0.37 * k as f64
            })
            .collect();
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        out.push(v.iter().map(|t| t / norm).collect());
    }
    out
}

/// Check |x|^{1.1} |eta| stays bounded as |x| -> 0 inside B_2.
fn check_singularity<F>(eta: &F, component: usize, n: usize, bound: f64) -> Result<()>
where
    F: Fn(usize, &[f64]) -> Vec<f64>,
{
    let dirs = directions(n, 24);
    let weighted = |r: f64| -> f64 {
        dirs.iter()
            .map(|w| {
                let x: Vec<f64> = w.iter().map(|t| r * t).collect();
                r.powf(1.1) * eta(component, &x).iter().map(|t| t * t).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    };
    let reference = [2.0, 1.0, 0.5].iter().map(|&r| weighted(r)).fold(0.0, f64::max);
    for k in 2..40 {
        let r = 2f64.powi(-k);
        let v = weighted(r);
        if !v.is_finite() || v > bound * reference.max(1e-300) && v > 1e-12 {
            return Err(LabError::Hypothesis(format!(
                "|x|^1.1 |eta| grows near the origin on component {component}: {v:.3e} at r = {r:.1e}"
            )));
        }
    }
    Ok(())
}

/// Flux of eta through the circle of radius r (n = 2).
fn flux<F>(eta: &F, component: usize, r: f64) -> f64
where
    F: Fn(usize, &[f64]) -> Vec<f64>,
{
    let m = 64;
    let mut acc = 0.0;
    for j in 0..m {
        let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let (s, c) = t.sin_cos();
        let v = eta(component, &[r * c, r * s]);
        acc += (v[0] * c + v[1] * s) * r;
    }
    acc * 2.0 * std::f64::consts::PI / m as f64
}

/// Project a sampled exact 1-form on a plane-union cone onto the modes e_alpha.
///
/// `eta(component, x)` returns the components of eta at intrinsic coordinates x.
pub fn expand_initial<F>(cone: &PlaneUnionCone, eta: F, opts: &ExpandOptions) -> Result<ModeExpansion>
where
    F: Fn(usize, &[f64]) -> Vec<f64>,
{
    let n = cone.n;
    let m = if opts.quad_points == 0 { opts.d_max + 8 } else { opts.quad_points };
    let (u, w) = gauss_hermite(m);
    let nodes: Vec<f64> = u.iter().map(|t| 2.0 * t).collect();
    let weights: Vec<f64> = w.iter().map(|t| t / std::f64::consts::PI.sqrt()).collect();
    // factor tables: value and first derivative of each 1D factor at each node
    let kmax = opts.d_max;
    let table: Vec<Vec<[f64; 2]>> = (0..=kmax)
        .map(|a| nodes.iter().map(|&x| [factor_derivative(a, 0, x), factor_derivative(a, 1, x)]).collect())
        .collect();
    let alphas: Vec<Vec<usize>> = (1..=kmax).flat_map(|d| multi_indices(n, d)).collect();

    let mut modes = Vec::new();
    let mut a0s = Vec::new();
    let mut total_tail = 0.0;
    let mut total_energy = 0.0;
    for comp in 0..cone.len() {
        check_singularity(&eta, comp, n, opts.singular_bound)?;
        let a0 = if n == 2 {
            let (r1, r2) = (1e-3, 2e-3);
            let (f1, f2) = (flux(&eta, comp, r1), flux(&eta, comp, r2));
            (4.0 * f1 - f2) / 3.0 / (2.0 * std::f64::consts::PI)
        } else {
            0.0
        };
        a0s.push(a0);
        let smooth = |x: &[f64]| -> Vec<f64> {
            let mut v = eta(comp, x);
            if a0 != 0.0 {
                let r2: f64 = x.iter().map(|t| t * t).sum();
                for (vi, xi) in v.iter_mut().zip(x) {
                    *vi -= a0 * xi / r2;
                }
            }
            v
        };
        let mut energy = 0.0;
        let mut proj = vec![0.0; alphas.len()];
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = idx.iter().map(|&i| nodes[i]).collect();
            let wt: f64 = idx.iter().map(|&i| weights[i]).product();
            let v = smooth(&x);
            energy += wt * v.iter().map(|t| t * t).sum::<f64>();
            for (p, alpha) in proj.iter_mut().zip(&alphas) {
                let mut dot = 0.0;
                for i in 0..n {
                    let mut g = v[i];
                    if g == 0.0 {
                        continue;
                    }
                    for (j, &a) in alpha.iter().enumerate() {
                        g *= table[a][idx[j]][usize::from(i == j)];
                    }
                    dot += g;
                }
                *p += wt * dot;
            }
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        let mut captured = 0.0;
        for (p, alpha) in proj.iter().zip(&alphas) {
            let c = p / form_scale(alpha);
            captured += c * c;
            if c.abs() > 1e-13 * energy.sqrt().max(1e-300) {
                modes.push(Mode::hermite(comp, alpha.clone(), c));
            }
        }
        total_tail += (energy - captured).max(0.0);
        total_energy += energy;
    }
    if total_tail > opts.tail_tol * total_energy.max(1.0) {
        return Err(LabError::Truncation {
            estimate: total_tail,
            tolerance: opts.tail_tol * total_energy.max(1.0),
        });
    }
    let mut e = ModeExpansion::new(n, modes)?;
    e.log_rate = opts.log_rate;
    e.cone = Some(cone.descriptor());
    e.tail_energy = total_tail;
    if n == 2 {
        e.a0 = Some(a0s);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_eigenfunction_round_trip() {
        let cone = PlaneUnionCone::plane(3);
        // phi = He_1(x/sqrt2) He_2(y/sqrt2)/sqrt2, d phi has norm sqrt(3/2)
        let alpha = [1usize, 2, 0];
        let s = form_scale(&alpha);
        let eta = |_: usize, x: &[f64]| -> Vec<f64> {
            (0..3)
                .map(|i| {
                    let beta: Vec<usize> = (0..3).map(|j| usize::from(i == j)).collect();
                    crate::drift::hermite::basis_derivative(&alpha, &beta, x) / s
                })
                .collect()
        };
        let e = expand_initial(&cone, eta, &ExpandOptions::default()).unwrap();
        assert_eq!(e.modes.len(), 1);
        assert_eq!(e.modes[0].index, vec![1, 2, 0]);
        assert!((e.modes[0].coeff - 1.0).abs() < 1e-10);
        assert!(e.tail_energy < 1e-12);
    }

    #[test]
    fn log_mode_extracted_in_two_dimensions() {
        let cone = PlaneUnionCone::plane(2);
        let eta = |_: usize, x: &[f64]| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            vec![x[0] / r2, x[1] / r2]
        };
        let e = expand_initial(&cone, eta, &ExpandOptions::default()).unwrap();
        assert!((e.a0.as_ref().unwrap()[0] - 1.0).abs() < 1e-12);
        assert!(e.modes.is_empty());
    }

    #[test]
    fn strongly_singular_input_rejected() {
        let cone = PlaneUnionCone::plane(3);
        let eta = |_: usize, x: &[f64]| {
            let r: f64 = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            x.iter().map(|t| t / r.powf(2.5)).collect::<Vec<_>>()
        };
        assert!(matches!(
            expand_initial(&cone, eta, &ExpandOptions::default()),
            Err(LabError::Hypothesis(_))
        ));
    }
}
