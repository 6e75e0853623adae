use clap::Args;
use serde::Serialize;

use lmcf_core::geom::records::write_records;
use lmcf_core::lawlor::{
    asymptotic_fit, lawlor_forward, lawlor_inverse, lawlor_profile, neck_potential, special_residual, GridSpec,
};

use super::{check, parse_list};
use crate::config::RunConfig;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Args, Serialize)]
pub struct LawlorArgs {
    /// Parameters a_1,..,a_n (all positive, n >= 3).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["phi", "area"])]
    pub a: Option<String>,
    /// Phases phi_1,..,phi_n summing to pi; use with --A.
    #[arg(long, allow_hyphen_values = true, requires = "area")]
    pub phi: Option<String>,
    /// Area invariant for the inverse map.
    #[arg(long = "A", allow_hyphen_values = true, requires = "phi")]
    pub area: Option<f64>,
    /// Profile grid half-width; defaults to the configured grid.
    #[arg(long)]
    pub y_max: Option<f64>,
    /// Profile grid size.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Serialize)]
struct RoundTrip {
    phi: Vec<f64>,
    area: f64,
    a: Vec<f64>,
    phi_forward: Vec<f64>,
    area_forward: f64,
    max_relative_error: f64,
    tolerance: f64,
}

pub fn run(args: &LawlorArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let mut round_trip = None;
    let a = match (&args.a, &args.phi, args.area) {
        (Some(a), None, None) => parse_list("a", a)?,
        (None, Some(phi), Some(area)) => {
            let phi = parse_list("phi", phi)?;
            let a = lawlor_inverse(&phi, area)?;
            let fwd = lawlor_forward(&a)?;
            let rel = phi
                .iter()
                .zip(&fwd.phi)
                .map(|(p, q)| (p - q).abs() / p.abs())
                .fold((fwd.area - area).abs() / area.abs(), f64::max);
            round_trip = Some(RoundTrip {
                phi,
                area,
                a: a.clone(),
                phi_forward: fwd.phi,
                area_forward: fwd.area,
                max_relative_error: rel,
                tolerance: cfg.tol("roundtrip")?,
            });
            a
        }
        _ => return Err(CliError::Usage("give either --a or both --phi and --A".into())),
    };
    let params = lawlor_forward(&a)?;
    let grid = GridSpec {
        y_max: args.y_max.unwrap_or(cfg.grid.y_max),
        points: args.points.unwrap_or(cfg.grid.points),
        stretch: None,
    };
    let profile = lawlor_profile(&a, &grid)?;
    let special = special_residual(&profile);
    let pot = neck_potential(&profile)?;
    let fits = asymptotic_fit(&profile)?;

    sink.json(
        "params.json",
        &serde_json::json!({
            "params": params,
            "phase_sum_error": (params.phase_sum() - std::f64::consts::PI).abs(),
            "round_trip": round_trip,
        }),
    )?;
    sink.json(
        "potential.json",
        &serde_json::json!({
            "a_invariant": pot.a_invariant,
            "area": params.area,
            "gap": (pot.a_invariant - params.area).abs(),
            "tail": pot.tail,
            "tail_exponent": pot.tail_exponent,
        }),
    )?;
    sink.json("asymptotic_fit.json", &fits)?;
    sink.json(
        "special_residual.json",
        &serde_json::json!({
            "sup_angle": special.sup_angle,
            "sup_omega": special.sup_omega,
            "warnings": special.warnings,
            "grid": grid,
        }),
    )?;
    let (header, records) = profile.to_records(Some(&special.angle), Some(&pot.f));
    sink.raw("profile.jsonl", |w| write_records(w, &header, &records))?;
    let n = profile.n();
    let mut cols: Vec<String> = vec!["y".into()];
    for k in 1..=n {
        cols.push(format!("re_z{k}"));
        cols.push(format!("im_z{k}"));
    }
    cols.push("theta".into());
    cols.push("f".into());
    let rows: Vec<Vec<f64>> = (0..profile.len())
        .map(|i| {
            let mut r = vec![profile.y[i]];
            for z in &profile.z[i] {
                r.push(z.re);
                r.push(z.im);
            }
            r.push(special.angle[i]);
            r.push(pot.f[i]);
            r
        })
        .collect();
    let cols: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    sink.dat("profile.dat", &cols, &rows)?;

    check(
        "phase-sum error",
        (params.phase_sum() - std::f64::consts::PI).abs(),
        cfg.tol("phase_sum")?,
    )?;
    if let Some(rt) = &round_trip {
        check("round-trip relative error", rt.max_relative_error, rt.tolerance)?;
    }
    Ok(())
}
