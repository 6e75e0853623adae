use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lmcf_core::cone::PlaneComponent;
use lmcf_core::lawlor::{lawlor_profile, neck_potential, GridSpec};
use lmcf_core::potential::{
    ball_monotonicity_check, bigon_strip, compactify, equicontinuity_audit, floer_degree, half_disc,
    integrate_potential, strip_area, PathSample, EQUICONTINUITY_C, EQUICONTINUITY_C0, EXACTNESS_TOL,
};

use super::{check, parse_list};
use crate::config::RunConfig;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum PotentialMode {
    /// Chord potential and compactified end values of a Lawlor neck.
    Neck,
    /// Stokes identity on the bigon between y = 0 and y = s sin x.
    Bigon,
    /// Floer degrees of (Pi_0, Pi_phi), both orders, plus random graded pairs.
    Floer,
    /// Ball ratio of a lifted half disc with boundary on R^2.
    Ball,
}

#[derive(Debug, Args, Serialize)]
pub struct PotentialArgs {
    /// Which identity to evaluate.
    #[arg(long, value_enum)]
    pub mode: PotentialMode,
    /// Lawlor parameters a_1..a_n for neck mode.
    #[arg(long, default_value = "1,1,1")]
    pub a: String,
    /// Phases for floer mode.
    #[arg(long, default_value = "0.9,1.1,1.1415926535897931")]
    pub phi: String,
    /// Bigon amplitude or ball perturbation size.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Sample count along paths (default 40001 for neck, 2001 for bigon).
    #[arg(long)]
    pub m: Option<usize>,
    /// Random graded pairs in floer mode.
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    /// Cutoff scale T of the compactification.
    #[arg(long = "T", default_value_t = 1.0)]
    pub big_t: f64,
}

fn neck(args: &PotentialArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let a = parse_list("a", &args.a)?;
    let grid = GridSpec {
        y_max: cfg.grid.y_max,
        points: args.m.unwrap_or(40001),
        stretch: None,
    };
    let p = lawlor_profile(&a, &grid)?;
    let n = p.n();
    let x = 1.0 / (n as f64).sqrt();
    let pts: Vec<Vec<f64>> = p
        .z
        .iter()
        .map(|row| row.iter().map(|z| z.re * x).chain(row.iter().map(|z| z.im * x)).collect())
        .collect();
    let path = PathSample::new(pts, false)?;
    let chord = integrate_potential(std::slice::from_ref(&path), None, EXACTNESS_TOL)?;
    let reference = neck_potential(&p)?;
    let f0 = reference.f[0];
    let gap = chord.values[0]
        .iter()
        .zip(&reference.f)
        .map(|(c, r)| (c + f0 - r).abs())
        .fold(0.0, f64::max);
    let params = match &p.meta {
        lmcf_core::lawlor::ProfileMeta::Lawlor { params } => params.clone(),
        _ => unreachable!("lawlor profile"),
    };
    let ends: Vec<f64> = [0, p.len() - 1]
        .iter()
        .map(|&i| compactify(&path.points[i], &params.phi, args.big_t).map(|c| c.compactified_potential(reference.f[i])))
        .collect::<lmcf_core::Result<_>>()?;
    let eq = equicontinuity_audit(
        std::slice::from_ref(&PathSample::new(path.points.iter().step_by(40).cloned().collect(), false)?),
        &integrate_potential(
            std::slice::from_ref(&PathSample::new(path.points.iter().step_by(40).cloned().collect(), false)?),
            None,
            EXACTNESS_TOL,
        )?,
        0.1,
        EQUICONTINUITY_C0,
        EQUICONTINUITY_C,
    )?;
    sink.json(
        "neck.json",
        &serde_json::json!({
            "a": a,
            "area": params.area,
            "a_invariant": reference.a_invariant,
            "chord_vs_profile_gap": gap,
            "compactified_ends": ends,
            "expected_ends": [0.0, params.area],
            "equicontinuity": eq,
        }),
    )?;
    Ok(())
}

fn bigon(args: &PotentialArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let pi = std::f64::consts::PI;
    let (soup, l, l2) = bigon_strip(f64::sin, 0.0, pi, args.m.unwrap_or(2001).max(2), args.s)?;
    let fl = integrate_potential(std::slice::from_ref(&l), None, EXACTNESS_TOL)?;
    let fl2 = integrate_potential(std::slice::from_ref(&l2), None, EXACTNESS_TOL)?;
    let r = strip_area(&l, &fl, &l2, &fl2, &[0.0, 0.0], &[pi, 0.0], &soup, 1e-9)?;
    sink.json("bigon.json", &serde_json::json!({ "s": args.s, "exact_area": 2.0 * args.s, "report": r }))?;
    check("Stokes discrepancy", r.discrepancy, cfg.tol("stokes")?)
}

fn floer(args: &PotentialArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let phi = parse_list("phi", &args.phi)?;
    let n = phi.len();
    let pi0 = PlaneComponent::diagonal(&vec![0.0; n], 0);
    let piphi = PlaneComponent::diagonal(&phi, 1);
    let origin = vec![0.0; 2 * n];
    let forward = floer_degree(&pi0, &piphi, origin.clone())?;
    let backward = floer_degree(&piphi, &pi0, origin.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut strict = 0;
    for _ in 0..args.pairs {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let d = floer_degree(&PlaneComponent::diagonal(&a, 0), &PlaneComponent::diagonal(&b, 1), origin.clone())?;
        strict += d.strict as usize;
    }
    sink.json(
        "floer.json",
        &serde_json::json!({
            "pi0_piphi": forward,
            "piphi_pi0": backward,
            "random_pairs": args.pairs,
            "strict": strict,
        }),
    )?;
    if strict != args.pairs {
        return Err(CliError::Tolerance(format!("{} of {} pairs violate the strict bound", args.pairs - strict, args.pairs)));
    }
    Ok(())
}

fn ball(args: &PotentialArgs, _cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let radii: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let l = PlaneComponent::diagonal(&[0.0, 0.0], 0);
    let delta = args.s;
    let soup = half_disc(2.0, 40, 128, false)?.lift_to_c2(|x, y| delta * y * (x + y));
    let r = ball_monotonicity_check(&soup, &l, &[0.0; 4], &radii, std::f64::consts::FRAC_PI_2 - 2.0 * delta, 1e-12)?;
    sink.json("ball.json", &serde_json::json!({ "delta": delta, "report": r }))?;
    Ok(())
}

pub fn run(args: &PotentialArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    match args.mode {
        PotentialMode::Neck => neck(args, cfg, sink),
        PotentialMode::Bigon => bigon(args, cfg, sink),
        PotentialMode::Floer => floer(args, cfg, sink),
        PotentialMode::Ball => ball(args, cfg, sink),
    }
}
