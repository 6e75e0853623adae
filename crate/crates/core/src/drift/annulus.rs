use serde::{Deserialize, Serialize};

use super::{eta_norm, ModeExpansion};
use crate::cone::{Clause, Outcome};
use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParabolicReport {
    /// ||eta(0)||, ||eta(1)||, ||eta(2)||.
    pub norms: [f64; 3],
    pub clause_1: Clause,
    pub clause_2: Clause,
    pub outcome: Outcome,
    /// True when some term has growth exponent lambda_j + 1 = d.
    pub has_degree_d: bool,
    /// Clause (3); None when excluded by its hypothesis.
    pub dichotomy: Option<bool>,
}

/// Evaluate the growth/decay implications of the parabolic three-annulus
/// dichotomy on an exact mode expansion.
pub fn three_annulus_parabolic(e: &ModeExpansion, d: f64, lambda1: f64, lambda2: f64) -> Result<ParabolicReport> {
    if !(0.0 < lambda1 && lambda1 < lambda2) {
        return Err(LabError::Parameter("need 0 < lambda1 < lambda2".into()));
    }
    e.validate()?;
    let norms = [eta_norm(e, 0.0), eta_norm(e, 1.0), eta_norm(e, 2.0)];
    let clause_1 = Clause {
        hypothesis: norms[1] >= (d + lambda1).exp() * norms[0],
        conclusion: norms[2] >= (d + lambda2).exp() * norms[1],
    };
    let clause_2 = Clause {
        hypothesis: norms[1] >= (-d + lambda1).exp() * norms[2],
        conclusion: norms[0] >= (-d + lambda2).exp() * norms[1],
    };
    let e = e.normalized();
    let log_growth = e
        .a0
        .as_ref()
        .is_some_and(|a| a.iter().any(|v| *v != 0.0))
        .then(|| e.log_rate.exponent());
    let has_degree_d = e.modes.iter().any(|m| m.growth() == d) || log_growth == Some(d);
    let outcome = Outcome::from_conclusions(clause_1.conclusion, clause_2.conclusion);
    Ok(ParabolicReport {
        norms,
        clause_1,
        clause_2,
        outcome,
        has_degree_d,
        dichotomy: (!has_degree_d).then_some(outcome != Outcome::Neither),
    })
}

/// Sufficient condition for clause (3) when every growth exponent differs
/// from d by at least `gap`: e^{2 (gap - lambda2)} >= 2.
pub fn parabolic_admissible(gap: f64, lambda2: f64) -> bool {
    gap > lambda2 && (2.0 * (gap - lambda2)).exp() >= 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::Mode;

    #[test]
    fn single_modes() {
        let grow = ModeExpansion::new(2, vec![Mode::hermite(0, vec![1, 0], 1.0)]).unwrap();
        let r = three_annulus_parabolic(&grow, 0.0, 0.05, 0.1).unwrap();
        assert!(r.clause_1.hypothesis && r.clause_1.conclusion);
        let decay = ModeExpansion::new(2, vec![Mode::hermite(0, vec![3, 0], 1.0)]).unwrap();
        let r = three_annulus_parabolic(&decay, 0.0, 0.05, 0.1).unwrap();
        assert!(r.clause_2.hypothesis && r.clause_2.conclusion);
    }
}
