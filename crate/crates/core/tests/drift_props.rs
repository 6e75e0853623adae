use proptest::prelude::*;

use lmcf_core::cone::{static_basis, three_annulus_elliptic, AnnulusMode, PlaneUnionCone};
use lmcf_core::drift::hermite::{basis_derivative, form_scale, multi_indices};
use lmcf_core::drift::{eta_norm, evolve, expand_initial, ExpandOptions, Mode, ModeExpansion};

fn expansion(n: usize, raw: &[(usize, f64)]) -> ModeExpansion {
    let modes = raw
        .iter()
        .enumerate()
        .map(|(k, &(deg, a))| {
            // distinct indices: degree deg concentrated on one axis, tagged by component k
            let mut idx = vec![0; n];
            idx[k % n] = deg;
            Mode::hermite(k / n, idx, a)
        })
        .collect();
    ModeExpansion::new(n, modes).unwrap()
}

fn modes_strategy() -> impl Strategy<Value = Vec<(usize, f64)>> {
    prop::collection::vec((1usize..8, -3.0f64..3.0), 1..6)
}

proptest! {
    #[test]
    fn evolution_is_a_semigroup(raw in modes_strategy(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let e = expansion(3, &raw);
        let a = evolve(&evolve(&e, s), t);
        let b = evolve(&e, s + t);
        for (x, y) in a.modes.iter().zip(&b.modes) {
            prop_assert!((x.coeff - y.coeff).abs() < 1e-12 * y.coeff.abs().max(1.0));
        }
    }

    #[test]
    fn norm_growth_is_bounded_by_the_top_mode(raw in modes_strategy(), t in 0.0f64..3.0) {
        let e = expansion(3, &raw);
        let bound = (t * e.max_growth()).exp() * eta_norm(&e, 0.0);
        prop_assert!(eta_norm(&e, t) <= bound * (1.0 + 1e-14));
        let single = expansion(3, &raw[..1]);
        let exact = (t * single.max_growth()).exp() * eta_norm(&single, 0.0);
        prop_assert!((eta_norm(&single, t) - exact).abs() < 1e-12 * exact.max(1.0));
    }

    #[test]
    fn static_forms_do_not_move(n in 2usize..5, t in -3.0f64..3.0, phase in 0.1f64..1.0) {
        let cone = PlaneUnionCone::from_phases(&[vec![0.0; n], vec![phase; n]]).unwrap();
        for s in static_basis(&cone) {
            let moved = evolve(&s.expansion, t);
            for (x, y) in moved.modes.iter().zip(&s.expansion.modes) {
                prop_assert!((x.coeff - y.coeff).abs() < 1e-12);
            }
            let a = eta_norm(&s.expansion, 0.0);
            prop_assert!((eta_norm(&s.expansion, t) - a).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_annulus_ratio(d in 0.0f64..6.0, n in 2usize..7, rho0 in 0.05f64..0.9, c in 0.1f64..10.0) {
        let r = three_annulus_elliptic(&[AnnulusMode { degree: d, coeff: c }], n, rho0, 1.0, 0.1, 0.2).unwrap();
        let target = rho0.powf(d + n as f64 / 2.0);
        prop_assert!((r.norms[1] / r.norms[0] - target).abs() < 1e-12);
        prop_assert!((r.norms[2] / r.norms[1] - target).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expansion_recovers_closed_form_modes(
        picks in prop::collection::vec((0usize..1000, -2.0f64..2.0), 1..5),
        two in any::<bool>(),
    ) {
        let n = 3;
        let cone = if two {
            PlaneUnionCone::from_phases(&[vec![0.0; n], vec![0.7; n]]).unwrap()
        } else {
            PlaneUnionCone::plane(n)
        };
        let pool: Vec<Vec<usize>> = (1..=6).flat_map(|d| multi_indices(n, d)).collect();
        let mut chosen: Vec<(usize, Vec<usize>, f64)> = Vec::new();
        for (k, (p, a)) in picks.iter().enumerate() {
            let comp = k % cone.len();
            let idx = pool[p % pool.len()].clone();
            if !chosen.iter().any(|(c, i, _)| *c == comp && *i == idx) {
                chosen.push((comp, idx, *a));
            }
        }
        let eta = |comp: usize, x: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let beta: Vec<usize> = (0..n).map(|j| usize::from(i == j)).collect();
                    chosen
                        .iter()
                        .filter(|(c, _, _)| *c == comp)
                        .map(|(_, idx, a)| a * basis_derivative(idx, &beta, x) / form_scale(idx))
                        .sum()
                })
                .collect()
        };
        let e = expand_initial(&cone, eta, &ExpandOptions::default()).unwrap();
        for (comp, idx, a) in &chosen {
            let got = e.modes.iter().find(|m| m.component == *comp && &m.index == idx).map_or(0.0, |m| m.coeff);
            prop_assert!((got - a).abs() < 1e-8, "{:?}: {} vs {}", idx, got, a);
        }
        for m in &e.modes {
            if !chosen.iter().any(|(c, i, _)| *c == m.component && *i == m.index) {
                prop_assert!(m.coeff.abs() < 1e-8, "spurious {:?}", m);
            }
        }
    }
}
