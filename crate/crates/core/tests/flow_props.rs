use proptest::prelude::*;

use lmcf_core::cone::PlaneUnionCone;
use lmcf_core::flow::{
    cone_windows, csf_evolve, distance_functionals, distance_functionals_at, fixtures, rescale_flow, CsfOptions,
    DistanceCase, ImmersedCurve, SpacetimePoint,
};

fn max_shift(a: &ImmersedCurve, b: &ImmersedCurve) -> f64 {
    a.components
        .iter()
        .zip(&b.components)
        .flat_map(|(c, d)| c.points.iter().zip(&d.points))
        .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lines_and_static_cones_stay_put(
        angles in prop::collection::vec(-3.0f64..3.0, 1..4),
        dt in 1e-3f64..5e-2,
    ) {
        let mut sorted = angles.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 0.2));
        let c = fixtures::line_union(&sorted, 20.0, 0.1).unwrap();
        let tr = csf_evolve(&c, &CsfOptions::new(dt, 40)).unwrap();
        prop_assert!(tr.singular.is_none());
        let last = tr.states.last().unwrap();
        let shift = max_shift(&c, last);
        prop_assert!(shift < 1e-12, "moved by {}", shift);
    }
}

#[test]
fn rescaled_and_unrescaled_functionals_agree() {
    let c = fixtures::hyperbola_pair(0.01, 10.0, 0.01).unwrap();
    let tr = csf_evolve(&c, &CsfOptions::new(2e-3, 200)).unwrap();
    let center = SpacetimePoint { x: [0.0, 0.0], t: 1.0 };
    let r = rescale_flow(&tr, center, None).unwrap();
    let w = PlaneUnionCone::from_phases(&[vec![fixtures::HYPERBOLA_CONE[0]], vec![fixtures::HYPERBOLA_CONE[1]]]).unwrap();
    for (k, (state, slice)) in r.states.iter().zip(&tr.states).enumerate().step_by(25) {
        for case in [DistanceCase::A, DistanceCase::B, DistanceCase::C { lambda2: 0.3 }] {
            let a = distance_functionals(state, &w, case).unwrap();
            let b = distance_functionals_at(slice, center, &w, case).unwrap();
            for (x, y) in [(a.e_w, b.e_w), (a.excess, b.excess), (a.theta_infimum, b.theta_infimum), (a.density, b.density)] {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "state {k}: {x} vs {y}");
            }
        }
    }
    // interpolated states match the functional on the interpolated slice up to the reported error
    let taus = [0.1, 0.2, 0.3];
    let ri = rescale_flow(&tr, center, Some(&taus)).unwrap();
    for s in &ri.states {
        let k = r.nearest(s.tau).unwrap();
        let a = distance_functionals(s, &w, DistanceCase::A).unwrap();
        let b = distance_functionals(&r.states[k], &w, DistanceCase::A).unwrap();
        assert!((a.density - b.density).abs() < 1e-2, "{} vs {}", a.density, b.density);
    }
}

#[test]
fn window_times_follow_their_tolerances() {
    let c = fixtures::hyperbola_pair(0.01, 10.0, 0.01).unwrap();
    let tr = csf_evolve(&c, &CsfOptions::new(2e-3, 450)).unwrap();
    let r = rescale_flow(&tr, SpacetimePoint { x: [0.0, 0.0], t: 1.0 }, None).unwrap();
    let w = PlaneUnionCone::from_phases(&[vec![fixtures::HYPERBOLA_CONE[0]], vec![fixtures::HYPERBOLA_CONE[1]]]).unwrap();
    let centers = [[0.0, 0.0], [0.05, 0.05], [0.3, -0.1]];
    let report = |eps: f64, delta: f64, kappa1: f64| cone_windows(&r, &w, eps, delta, kappa1, &centers).unwrap();
    let h = |t: lmcf_core::flow::WindowTime, rep: &lmcf_core::flow::ConeWindowReport| t.or_horizon(rep.horizon);

    let epss = [0.12, 0.2, 0.3, 0.5, 0.8];
    let t1: Vec<f64> = epss.iter().map(|&e| {
        let rep = report(e, 0.1, 0.1);
        h(rep.t1, &rep)
    }).collect();
    assert!(t1.windows(2).all(|p| p[0] <= p[1]), "T1 {t1:?}");

    let deltas = [1e-4, 1e-3, 1e-2, 0.1, 0.5];
    let tt: Vec<f64> = deltas.iter().map(|&d| {
        let rep = report(0.5, d, 0.1);
        h(rep.t_theta, &rep)
    }).collect();
    assert!(tt.windows(2).all(|p| p[0] <= p[1]), "T_Theta {tt:?}");

    let kappas = [0.05, 0.5, 0.9, 0.98, 1.02, 1.1, 1.5];
    let r0: Vec<Vec<f64>> = kappas.iter().map(|&k| report(0.5, 0.1, k).r0.iter().map(|p| p.1).collect()).collect();
    for j in 0..centers.len() {
        assert!(r0.windows(2).all(|p| p[0][j] >= p[1][j]), "r0 {r0:?}");
    }
}
