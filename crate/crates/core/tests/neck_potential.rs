use lmcf_core::lawlor::{lawlor_forward, lawlor_profile, neck_potential, GridSpec, ProfileLagrangian};
use lmcf_core::potential::{compactify, integrate_potential, PathSample, EXACTNESS_TOL};

/// The neck traced along the diagonal sphere direction.
fn diagonal_path(p: &ProfileLagrangian) -> PathSample {
    let x = 1.0 / (p.n() as f64).sqrt();
    let pts = p
        .z
        .iter()
        .map(|row| row.iter().map(|z| z.re * x).chain(row.iter().map(|z| z.im * x)).collect())
        .collect();
    PathSample::new(pts, false).unwrap()
}

fn chord_gap(a: &[f64], points: usize) -> f64 {
    let p = lawlor_profile(a, &GridSpec { points, ..GridSpec::default() }).unwrap();
    let path = diagonal_path(&p);
    let chord = integrate_potential(std::slice::from_ref(&path), None, EXACTNESS_TOL).unwrap();
    let reference = neck_potential(&p).unwrap();
    let f0 = reference.f[0];
    chord.values[0]
        .iter()
        .zip(&reference.f)
        .map(|(c, r)| (c + f0 - r).abs())
        .fold(0.0, f64::max)
}

#[test]
fn chord_potential_converges_to_the_profile_potential() {
    let a = [1.0, 1.5, 0.6];
    let gaps: Vec<f64> = [5001, 10001, 20001, 40001].iter().map(|&m| chord_gap(&a, m)).collect();
    for w in gaps.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.8, "{gaps:?}");
    }
    assert!(gaps[3] < 1e-7, "{gaps:?}");
}

#[test]
fn compactified_ends_approach_zero_and_the_area() {
    let a = [1.0, 1.0, 1.0];
    let area = lawlor_forward(&a).unwrap().area;
    let mut last = [f64::INFINITY; 2];
    for y_max in [1e2, 1e3, 1e4] {
        let p = lawlor_profile(&a, &GridSpec { y_max, points: 8001, stretch: None }).unwrap();
        let path = diagonal_path(&p);
        let f = neck_potential(&p).unwrap();
        let phi = match &p.meta {
            lmcf_core::lawlor::ProfileMeta::Lawlor { params } => params.phi.clone(),
            _ => unreachable!(),
        };
        let end = |i: usize| compactify(&path.points[i], &phi, 1.0).unwrap().compactified_potential(f.f[i]);
        let dev = [end(0).abs(), (end(p.len() - 1) - area).abs()];
        assert!(dev[0] < last[0] && dev[1] < last[1], "Y = {y_max}: {dev:?} after {last:?}");
        last = dev;
    }
    assert!(last[0] < 1e-4 && last[1] < 1e-4, "{last:?}");
}
