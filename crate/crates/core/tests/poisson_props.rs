use proptest::prelude::*;

use lmcf_core::lawlor::GridSpec;
use lmcf_core::poisson::{model_rhs, solve_equivariant_poisson, symmetric_neck, WeightedFunction};

fn grid() -> GridSpec {
    GridSpec { y_max: 1e3, points: 4001, stretch: None }
}

#[test]
fn solutions_decay_at_the_requested_rate() {
    let neck = symmetric_neck(3, 1.0, &grid()).unwrap();
    for rho in [-0.3, -0.5, -0.9] {
        let rhs = model_rhs(&neck, rho, 1.0).unwrap();
        let sol = solve_equivariant_poisson(&neck, &rhs, rho).unwrap();
        for rate in sol.rate {
            let r = rate.expect("both ends fitted");
            assert!(((r - rho) / rho).abs() < 0.1, "rho {rho}: fitted {r}");
        }
    }
}

#[test]
fn zero_rhs_gives_zero() {
    let neck = symmetric_neck(3, 1.0, &grid()).unwrap();
    let rhs = WeightedFunction::on_neck(&neck, -2.5, |_| 0.0).unwrap();
    let sol = solve_equivariant_poisson(&neck, &rhs, -0.5).unwrap();
    assert!(sol.u.u.iter().all(|v| v.abs() < 1e-14));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solution_is_linear_in_the_rhs(c in -5.0f64..5.0, rho in -0.9f64..-0.2) {
        prop_assume!(c.abs() > 1e-3);
        let neck = symmetric_neck(3, 1.0, &GridSpec { y_max: 1e3, points: 1001, stretch: None }).unwrap();
        let one = solve_equivariant_poisson(&neck, &model_rhs(&neck, rho, 1.0).unwrap(), rho).unwrap();
        let many = solve_equivariant_poisson(&neck, &model_rhs(&neck, rho, c).unwrap(), rho).unwrap();
        let scale = one.u.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in one.u.u.iter().zip(&many.u.u) {
            prop_assert!((c * a - b).abs() < 1e-10 * scale * c.abs());
        }
        let fresh = many.u.recompute_norms();
        let declared = many.u.norms;
        for (x, y) in [(fresh.c0, declared.c0), (fresh.c1, declared.c1), (fresh.c2, declared.c2), (fresh.holder, declared.holder)] {
            prop_assert!((x - y).abs() <= 1e-8 * y.abs().max(1.0));
        }
    }
}
