use serde::{Deserialize, Serialize};

use super::PlaneUnionCone;
use crate::drift::{Mode, ModeExpansion};

/// A static solution d(f + c|x|^2) supported on one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaticForm {
    pub component: usize,
    /// Generator, e.g. "x1*x3", "x1^2-x2^2" or "|x|^2".
    pub generator: String,
    pub expansion: ModeExpansion,
}

fn unit(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut a = vec![0; n];
    a[i] += 1;
    a[j] += 1;
    a
}

/// Degree-2 harmonic generators per plane component plus d|x|^2.
///
/// With x = sqrt 2 u: x_i x_j = 2 He_1 He_1 and x_i^2 = 2 He_2 + 2, so every
/// generator is a combination of degree-2 Hermite modes.
pub fn static_basis(cone: &PlaneUnionCone) -> Vec<StaticForm> {
    let n = cone.n;
    let c2 = 2.0 * std::f64::consts::SQRT_2;
    let mut out = Vec::new();
    let mut push = |component: usize, generator: String, modes: Vec<Mode>| {
        let mut e = ModeExpansion::new(n, modes).expect("static modes are valid");
        e.cone = Some(cone.descriptor());
        out.push(StaticForm {
            component,
            generator,
            expansion: e,
        });
    };
    for comp in 0..cone.len() {
        for i in 0..n {
            for j in i + 1..n {
                push(comp, format!("x{}*x{}", i + 1, j + 1), vec![Mode::hermite(comp, unit(n, i, j), 2.0)]);
            }
        }
        for k in 1..n {
            push(
                comp,
                format!("x1^2-x{}^2", k + 1),
                vec![
                    Mode::hermite(comp, unit(n, 0, 0), c2),
                    Mode::hermite(comp, unit(n, k, k), -c2),
                ],
            );
        }
        push(
            comp,
            "|x|^2".into(),
            (0..n).map(|i| Mode::hermite(comp, unit(n, i, i), c2)).collect(),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::{eta_norm, evolve};

    #[test]
    fn counts_and_staticity() {
        let b = static_basis(&PlaneUnionCone::plane(3));
        assert_eq!(b.len(), 3 * 4 / 2 - 1 + 1);
        let two = PlaneUnionCone::from_phases(&[vec![0.0; 3], vec![0.5, 0.5, 0.5]]).unwrap();
        assert_eq!(static_basis(&two).len(), 2 * b.len());
        for s in &b {
            let later = evolve(&s.expansion, 3.7);
            for (a, c) in s.expansion.modes.iter().zip(&later.modes) {
                assert!((a.coeff - c.coeff).abs() < 1e-12);
            }
            assert!((eta_norm(&s.expansion, 5.0) - eta_norm(&s.expansion, 0.0)).abs() < 1e-12);
        }
    }
}
