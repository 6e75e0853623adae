use serde::{Deserialize, Serialize};

use super::hermite::{basis_derivative, form_scale};
use super::{eta_norm, evolve, ModeExpansion};
use crate::error::{LabError, Result};

pub const DEFAULT_P_GRID: [f64; 8] = [1.05, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0];

/// Largest constant accepted as a witness.
pub const WITNESS_CAP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub k: usize,
    /// (p, worst ratio over samples) for every p in the grid.
    pub by_p: Vec<(f64, f64)>,
    /// Best witnessing p and its ratio, if any p gives a finite ratio below the cap.
    pub witness: Option<(f64, f64)>,
    /// True when the log terms were split off and only eta_1 was tested.
    pub smooth_part_only: bool,
}

impl EnvelopeReport {
    pub fn ratio(&self) -> f64 {
        self.witness.map(|w| w.1).unwrap_or(f64::INFINITY)
    }
}

fn multinomial(k: usize, beta: &[usize]) -> f64 {
    let f = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    f(k) / beta.iter().map(|&b| f(b)).product::<f64>()
}

/// |grad^k eta|^2 at x for a Hermite expansion on one component.
fn derivative_energy(e: &ModeExpansion, component: usize, k: usize, x: &[f64]) -> f64 {
    let n = e.n;
    let order = k + 1;
    let mut total = 0.0;
    for beta in super::hermite::multi_indices(n, order) {
        let v: f64 = e
            .modes
            .iter()
            .filter(|m| m.component == component)
            .map(|m| m.coeff * basis_derivative(&m.index, &beta, x) / form_scale(&m.index))
            .sum();
        total += multinomial(order, &beta) * v * v;
    }
    total
}

/// sup_x |grad^k eta(1)|^2 / (max{|x|^-k, 1} e^{|x|^2/(4p)} ||eta(0)||^2)
/// over the samples, for each p of the grid.
pub fn pointwise_envelope_check(
    e: &ModeExpansion,
    k: usize,
    samples: &[(usize, Vec<f64>)],
    p_grid: &[f64],
) -> Result<EnvelopeReport> {
    if k > 2 {
        return Err(LabError::Parameter("envelope check supports k <= 2".into()));
    }
    if e.modes.iter().any(|m| m.index.is_empty()) {
        return Err(LabError::Unsupported("envelope needs closed-form plane modes".into()));
    }
    let smooth_part_only = e.a0.is_some();
    let base = e.smooth_part().normalized();
    let norm0 = eta_norm(&base, 0.0);
    let at1 = evolve(&base, 1.0);
    let energies: Vec<(f64, f64)> = samples
        .iter()
        .map(|(c, x)| {
            let r2: f64 = x.iter().map(|t| t * t).sum();
            (r2, derivative_energy(&at1, *c, k, x))
        })
        .collect();
    let mut by_p = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let worst = if norm0 == 0.0 {
            0.0
        } else {
            energies
                .iter()
                .map(|&(r2, en)| {
                    let r = r2.sqrt();
                    let pre = if smooth_part_only { 1.0 } else { r.powi(-(k as i32)).max(1.0) };
                    en / (pre * (r2 / (4.0 * p)).exp() * norm0 * norm0)
                })
                .fold(0.0, f64::max)
        };
        by_p.push((p, worst));
    }
    let witness = by_p
        .iter()
        .cloned()
        .filter(|(p, r)| *p > 1.0 && r.is_finite() && *r <= WITNESS_CAP)
        .min_by(|a, b| a.1.total_cmp(&b.1));
    Ok(EnvelopeReport {
        k,
        by_p,
        witness,
        smooth_part_only,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::Mode;

    #[test]
    fn zero_expansion_has_zero_ratio() {
        let e = ModeExpansion::zero(2);
        let s = vec![(0, vec![0.5, 0.5])];
        let r = pointwise_envelope_check(&e, 1, &s, &DEFAULT_P_GRID).unwrap();
        assert_eq!(r.ratio(), 0.0);
    }

    #[test]
    fn single_mode_ratio_finite() {
        let e = ModeExpansion::new(2, vec![Mode::hermite(0, vec![1, 1], 1.0)]).unwrap();
        let s: Vec<(usize, Vec<f64>)> = (1..40).map(|i| (0, vec![0.25 * i as f64, 0.1])).collect();
        let r = pointwise_envelope_check(&e, 0, &s, &DEFAULT_P_GRID).unwrap();
        assert!(r.ratio().is_finite() && r.ratio() > 0.0);
    }
}
