use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lmcf_core::cone::{degree_of, drift_mode};
use lmcf_core::lawlor::{lawlor_forward, lawlor_inverse, lawlor_profile, neck_potential, special_residual, GridSpec};

fn random_a(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.gen_range(-1.0..1.0))).collect()
}

#[test]
fn phases_sum_to_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..100 {
        let a = random_a(&mut rng, 3 + i % 3);
        let p = lawlor_forward(&a).unwrap();
        assert!((p.phase_sum() - PI).abs() < 1e-8, "{a:?}: {}", p.phase_sum());
        assert!(p.area > 0.0);
    }
}

#[test]
fn scaling_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for i in 0..20 {
        let a = random_a(&mut rng, 3 + i % 3);
        let lam: f64 = 10f64.powf(rng.gen_range(-0.5..0.5));
        let p = lawlor_forward(&a).unwrap();
        let scaled: Vec<f64> = a.iter().map(|v| v / (lam * lam)).collect();
        let q = lawlor_forward(&scaled).unwrap();
        for (x, y) in p.phi.iter().zip(&q.phi) {
            assert!(((x - y) / x).abs() < 1e-8);
        }
        let target = lam * lam * p.area;
        assert!(((q.area - target) / target).abs() < 1e-8, "{} vs {target}", q.area);
    }
}

#[test]
fn forward_inverse_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for i in 0..30 {
        let a = random_a(&mut rng, 3 + i % 3);
        let p = lawlor_forward(&a).unwrap();
        let back = lawlor_inverse(&p.phi, p.area).unwrap();
        for (x, y) in a.iter().zip(&back) {
            assert!(((x - y) / x).abs() < 1e-6, "{a:?} -> {back:?}");
        }
    }
}

#[test]
fn potential_gap_is_the_area_parameter() {
    for a in [vec![1.0, 1.0, 1.0], vec![0.5, 2.0, 3.0], vec![1.0, 2.0, 0.7, 1.5]] {
        let p = lawlor_forward(&a).unwrap();
        let prof = lawlor_profile(&a, &GridSpec::default()).unwrap();
        let f = neck_potential(&prof).unwrap();
        assert!((f.a_invariant - p.area).abs() < 1e-6, "{a:?}: {} vs {}", f.a_invariant, p.area);
    }
}

#[test]
fn special_residual_refines_quadratically() {
    let a = [0.8, 1.3, 2.1];
    let sups: Vec<f64> = [2001, 4001, 8001, 16001]
        .iter()
        .map(|&points| {
            let g = GridSpec { points, ..GridSpec::default() };
            special_residual(&lawlor_profile(&a, &g).unwrap()).sup_angle
        })
        .collect();
    let xs: Vec<f64> = (0..4).map(|k| -(k as f64) * 2f64.ln()).collect();
    let ys: Vec<f64> = sups.iter().map(|s| s.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    assert!(slope >= 1.8, "{sups:?} slope {slope}");
}

proptest! {
    #[test]
    fn degree_round_trip(d in 0.0f64..40.0, n in 2usize..8) {
        let m = drift_mode(d, n).unwrap();
        prop_assert!((m.lambda + d / 2.0).abs() == 0.0);
        prop_assert!((m.growth - (1.0 - d / 2.0)).abs() < 1e-15);
        let back = degree_of(m.mu, n);
        prop_assert!((back - d).abs() < 1e-12 * d.max(1.0), "{} -> {}", d, back);
    }

    #[test]
    fn degree_solves_the_quadratic(mu in 0.0f64..1e4, n in 2usize..8) {
        let d = degree_of(mu, n);
        prop_assert!((d * (d + n as f64 - 2.0) - mu).abs() < 1e-12 * mu.max(1.0));
    }
}
