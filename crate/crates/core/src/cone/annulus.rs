use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// A homogeneous harmonic 1-form component: |eta|(r z) = r^degree |eta|(z),
/// normalized so that its L^2 norm over the unit link is |coeff|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusMode {
    pub degree: f64,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub hypothesis: bool,
    pub conclusion: bool,
}

impl Clause {
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    First,
    Second,
    Both,
    Neither,
}

impl Outcome {
    pub(crate) fn from_conclusions(a: bool, b: bool) -> Self {
        match (a, b) {
            (true, true) => Self::Both,
            (true, false) => Self::First,
            (false, true) => Self::Second,
            (false, false) => Self::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticReport {
    /// Norms on A(1, rho0), A(rho0, rho0^2), A(rho0^2, rho0^3).
    pub norms: [f64; 3],
    pub clause_i: Clause,
    pub clause_ii: Clause,
    pub outcome: Outcome,
    /// True when some mode has degree exactly d.
    pub has_degree_d: bool,
    /// Whether the final dichotomy holds; None when it is not asserted.
    pub dichotomy: Option<bool>,
}

/// int_a^b r^p dr for 0 < a < b.
fn radial_power_integral(p: f64, a: f64, b: f64) -> f64 {
    let q = p + 1.0;
    if q.abs() < 1e-14 {
        (b / a).ln()
    } else {
        // b^q - a^q written to keep relative accuracy when q is small
        let lb = b.ln();
        let la = a.ln();
        (q * lb).exp() * -(q * (la - lb)).exp_m1() / q
    }
}

/// Squared annulus norm sum_m c_m^2 int r^{2 e_m + n - 1} dr, modes being
/// L^2-orthogonal on every sphere.
fn annulus_norm(modes: &[AnnulusMode], n: usize, inner: f64, outer: f64) -> f64 {
    modes
        .iter()
        .map(|m| m.coeff * m.coeff * radial_power_integral(2.0 * m.degree + n as f64 - 1.0, inner, outer))
        .sum::<f64>()
        .sqrt()
}

/// Evaluate both implications of the elliptic three-annulus dichotomy.
pub fn three_annulus_elliptic(
    modes: &[AnnulusMode],
    n: usize,
    rho0: f64,
    d: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<EllipticReport> {
    if modes.is_empty() {
        return Err(LabError::Empty("mode list".into()));
    }
    if !(0.0 < lambda1 && lambda1 < lambda2) {
        return Err(LabError::Parameter("need 0 < lambda1 < lambda2".into()));
    }
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(LabError::Parameter("rho0 must lie in (0, 1)".into()));
    }
    let half = n as f64 / 2.0;
    let r1 = rho0;
    let r2 = rho0 * rho0;
    let r3 = r2 * rho0;
    let norms = [
        annulus_norm(modes, n, r1, 1.0),
        annulus_norm(modes, n, r2, r1),
        annulus_norm(modes, n, r3, r2),
    ];
    let clause_i = Clause {
        hypothesis: norms[1] >= rho0.powf(d - lambda1 + half) * norms[0],
        conclusion: norms[2] >= rho0.powf(d - lambda2 + half) * norms[1],
    };
    let clause_ii = Clause {
        hypothesis: norms[1] >= rho0.powf(-d - lambda1 - half) * norms[2],
        conclusion: norms[0] >= rho0.powf(-d - lambda2 - half) * norms[1],
    };
    let has_degree_d = modes.iter().any(|m| m.degree == d && m.coeff != 0.0);
    let outcome = Outcome::from_conclusions(clause_i.conclusion, clause_ii.conclusion);
    Ok(EllipticReport {
        norms,
        clause_i,
        clause_ii,
        outcome,
        has_degree_d,
        dichotomy: (!has_degree_d).then_some(outcome != Outcome::Neither),
    })
}

/// Sufficient condition for the dichotomy at (rho0, lambda2) when every mode
/// degree differs from d by at least `gap`: a mode of degree d + g contributes
/// rho0^{2 g} to the middle-to-outer ratio, so rho0^{-2 (g - lambda2)} >= 2
/// leaves room for a competing term of equal weight.
pub fn elliptic_admissible(rho0: f64, gap: f64, lambda2: f64) -> bool {
    gap > lambda2 && rho0.powf(-2.0 * (gap - lambda2)) >= 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_ratio_is_homogeneous() {
        for (e, n) in [(0.0, 3), (1.5, 2), (-1.0, 4), (-2.0, 4)] {
            let r = three_annulus_elliptic(&[AnnulusMode { degree: e, coeff: 1.3 }], n, 0.2, 0.5, 0.1, 0.2).unwrap();
            let want = 0.2f64.powf(e + n as f64 / 2.0);
            assert!((r.norms[1] / r.norms[0] - want).abs() < 1e-12 * want);
            assert!((r.norms[2] / r.norms[1] - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn degree_d_mode_skips_dichotomy() {
        let r = three_annulus_elliptic(&[AnnulusMode { degree: 1.0, coeff: 1.0 }], 3, 0.1, 1.0, 0.1, 0.2).unwrap();
        assert!(r.has_degree_d && r.dichotomy.is_none());
        assert!(three_annulus_elliptic(&[], 3, 0.1, 1.0, 0.1, 0.2).is_err());
    }
}
