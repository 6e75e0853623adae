//! Mode expansions of exact solutions of the linearized rescaled flow
//! d eta / dt = Delta eta + (eta - x . grad eta) / 2 on cones.

mod annulus;
mod envelope;
mod expand;
pub mod hermite;

pub use annulus::{parabolic_admissible, three_annulus_parabolic, ParabolicReport};
pub use envelope::{pointwise_envelope_check, EnvelopeReport, DEFAULT_P_GRID};
pub use expand::{expand_initial, ExpandOptions};

use serde::{Deserialize, Serialize};

use crate::cone::ConeDescriptor;
use crate::error::{LabError, Result};

/// Time dependence of the a_0 d ln|x| term for n = 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogModeRate {
    /// a_0 e^t, which is what the equation gives for the degree -1 form d ln|x|.
    #[default]
    Full,
    /// a_0 e^{t/2}.
    Half,
}

impl LogModeRate {
    pub fn exponent(self) -> f64 {
        match self {
            Self::Full => 1.0,
            Self::Half => 0.5,
        }
    }
}

/// One term a e^{(1 - d/2) t} e_alpha of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    #[serde(default)]
    pub component: usize,
    /// Hermite multi-index on a plane component; empty for modes known
    /// only through their degree.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub index: Vec<usize>,
    #[serde(rename = "d")]
    pub degree: f64,
    #[serde(rename = "a")]
    pub coeff: f64,
}

impl Mode {
    pub fn hermite(component: usize, index: Vec<usize>, coeff: f64) -> Self {
        let degree = index.iter().sum::<usize>() as f64;
        Self {
            component,
            index,
            degree,
            coeff,
        }
    }

    /// Growth exponent lambda + 1 = 1 - d/2.
    pub fn growth(&self) -> f64 {
        1.0 - self.degree / 2.0
    }

    fn key(&self) -> (usize, &[usize], u64) {
        (self.component, &self.index, self.degree.to_bits())
    }
}

/// Finite combination of orthonormal modes plus optional log terms.
///
/// Distinct (component, index, degree) triples are orthonormal 1-forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeExpansion {
    pub n: usize,
    pub modes: Vec<Mode>,
    /// a_0 per plane component (n = 2 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Vec<f64>>,
    #[serde(default)]
    pub log_rate: LogModeRate,
    #[serde(default, rename = "cone_ref", skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeDescriptor>,
    /// Energy not captured by the truncated expansion.
    #[serde(default)]
    pub tail_energy: f64,
}

impl ModeExpansion {
    pub fn new(n: usize, modes: Vec<Mode>) -> Result<Self> {
        let e = Self {
            n,
            modes,
            a0: None,
            log_rate: LogModeRate::default(),
            cone: None,
            tail_energy: 0.0,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            modes: Vec::new(),
            a0: None,
            log_rate: LogModeRate::default(),
            cone: None,
            tail_energy: 0.0,
        }
    }

    pub fn with_log(mut self, a0: Vec<f64>) -> Result<Self> {
        self.a0 = Some(a0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for m in &self.modes {
            if !m.coeff.is_finite() || !m.degree.is_finite() {
                return Err(LabError::Parameter("non-finite mode data".into()));
            }
            if m.degree <= 0.0 {
                return Err(LabError::Parameter(format!(
                    "degree {} mode has d phi = 0 and is not a 1-form mode",
                    m.degree
                )));
            }
            if !m.index.is_empty() && (m.index.len() != self.n || m.index.iter().sum::<usize>() as f64 != m.degree) {
                return Err(LabError::Parameter("Hermite index does not match degree".into()));
            }
        }
        if let Some(a0) = &self.a0 {
            if self.n != 2 {
                return Err(LabError::Parameter("log coefficients exist only for n = 2".into()));
            }
            if let Some(ConeDescriptor::FlatTorus { .. } | ConeDescriptor::HarveyLawson | ConeDescriptor::Discretized { .. }) = &self.cone {
                return Err(LabError::Parameter("log coefficients need a plane-union cone".into()));
            }
            if a0.iter().any(|v| !v.is_finite()) {
                return Err(LabError::Parameter("non-finite log coefficient".into()));
            }
        }
        Ok(())
    }

    /// Merge repeated modes and drop zero coefficients.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        let mut modes: Vec<Mode> = Vec::new();
        for m in &self.modes {
            if let Some(existing) = modes.iter_mut().find(|e| e.key() == m.key()) {
                existing.coeff += m.coeff;
            } else {
                modes.push(m.clone());
            }
        }
        modes.retain(|m| m.coeff != 0.0);
        out.modes = modes;
        out
    }

    /// Pointwise sum; the log rates must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.log_rate != other.log_rate {
            return Err(LabError::Parameter("expansions live on different cones or rates".into()));
        }
        let mut out = self.clone();
        out.modes.extend(other.modes.iter().cloned());
        out.a0 = match (&self.a0, &other.a0) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (Some(a), Some(b)) => {
                let len = a.len().max(b.len());
                Some((0..len).map(|i| a.get(i).unwrap_or(&0.0) + b.get(i).unwrap_or(&0.0)).collect())
            }
        };
        out.tail_energy = self.tail_energy + other.tail_energy;
        Ok(out.normalized())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for m in out.modes.iter_mut() {
            m.coeff *= s;
        }
        if let Some(a0) = out.a0.as_mut() {
            a0.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// The smooth part eta_1 (log coefficients dropped).
    pub fn smooth_part(&self) -> Self {
        let mut out = self.clone();
        out.a0 = None;
        out
    }

    pub fn max_growth(&self) -> f64 {
        let mut g = self.modes.iter().map(Mode::growth).fold(f64::NEG_INFINITY, f64::max);
        if self.a0.as_ref().is_some_and(|a| a.iter().any(|v| *v != 0.0)) {
            g = g.max(self.log_rate.exponent());
        }
        g
    }
}

/// Exact evolution: a_j -> a_j e^{(1 - d_j/2) t}, a_0 -> a_0 e^{rate t}.
pub fn evolve(e: &ModeExpansion, t: f64) -> ModeExpansion {
    let mut out = e.clone();
    for m in out.modes.iter_mut() {
        m.coeff *= (m.growth() * t).exp();
    }
    let f = (e.log_rate.exponent() * t).exp();
    if let Some(a0) = out.a0.as_mut() {
        a0.iter_mut().for_each(|v| *v *= f);
    }
    out
}

/// ||eta(t)||^2 = sum |a_0(t)|^2 + ||eta_1(t)||^2.
pub fn eta_norm(e: &ModeExpansion, t: f64) -> f64 {
    let ev = evolve(&e.normalized(), t);
    let smooth: f64 = ev.modes.iter().map(|m| m.coeff * m.coeff).sum();
    let log: f64 = ev.a0.as_ref().map(|a| a.iter().map(|v| v * v).sum()).unwrap_or(0.0);
    (smooth + log).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_modes() -> ModeExpansion {
        ModeExpansion::new(
            3,
            vec![
                Mode::hermite(0, vec![1, 0, 0], 0.7),
                Mode::hermite(0, vec![2, 1, 1], -1.2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn semigroup_and_factors() {
        let e = two_modes();
        let a = evolve(&evolve(&e, 0.3), 0.9);
        let b = evolve(&e, 1.2);
        for (x, y) in a.modes.iter().zip(&b.modes) {
            assert!((x.coeff - y.coeff).abs() < 1e-12);
        }
        let d4 = ModeExpansion::new(3, vec![Mode::hermite(0, vec![4, 0, 0], 1.0)]).unwrap();
        assert!((evolve(&d4, 1.0).modes[0].coeff - (-1.0f64).exp()).abs() < 1e-15);
        assert!((eta_norm(&d4, 2.0) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn log_mode_rates() {
        let e = ModeExpansion::zero(2).with_log(vec![1.0]).unwrap();
        assert_eq!(eta_norm(&e, 0.0), 1.0);
        assert!((eta_norm(&e, 1.0) - 1f64.exp()).abs() < 1e-14);
        let mut h = e.clone();
        h.log_rate = LogModeRate::Half;
        assert!((eta_norm(&h, 1.0) - 0.5f64.exp()).abs() < 1e-14);
        assert!(ModeExpansion::zero(3).with_log(vec![1.0]).is_err());
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(ModeExpansion::new(2, vec![Mode { component: 0, index: vec![], degree: 0.0, coeff: 1.0 }]).is_err());
    }
}
