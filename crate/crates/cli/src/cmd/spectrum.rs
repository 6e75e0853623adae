use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use lmcf_core::cone::{link_spectrum, stability_check, ConeDescriptor};

use crate::config::RunConfig;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum ConeFamily {
    Plane,
    PlaneUnion,
    HarveyLawson,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    /// Built-in cone family.
    #[arg(long, value_enum, conflicts_with = "cone_file")]
    pub cone: Option<ConeFamily>,
    /// JSON cone descriptor (any supported family).
    #[arg(long)]
    pub cone_file: Option<PathBuf>,
    /// Dimension of the cone.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of planes for plane-union.
    #[arg(long, default_value_t = 2)]
    pub planes: usize,
    /// Largest link eigenvalue listed.
    #[arg(long, default_value_t = 30.0)]
    pub mu_max: f64,
}

pub fn run(args: &SpectrumArgs, _cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let desc = match (&args.cone, &args.cone_file) {
        (Some(ConeFamily::Plane), _) => ConeDescriptor::Plane { n: args.n },
        (Some(ConeFamily::PlaneUnion), _) => ConeDescriptor::PlaneUnion {
            n: args.n,
            planes: args.planes,
        },
        (Some(ConeFamily::HarveyLawson), _) => ConeDescriptor::HarveyLawson,
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            ConeDescriptor::from_value(&v)?
        }
        (None, None) => return Err(CliError::Usage("give --cone or --cone-file".into())),
    };
    let spec = link_spectrum(&desc, args.mu_max)?;
    let stability = stability_check(&desc)?;
    sink.json(
        "spectrum.json",
        &serde_json::json!({ "cone": desc, "spectrum": spec, "stability": stability }),
    )?;
    let rows: Vec<Vec<f64>> = spec
        .levels
        .iter()
        .map(|l| vec![l.mu, l.multiplicity as f64, l.degree, l.lambda])
        .collect();
    sink.csv("spectrum.csv", &["mu", "multiplicity", "degree", "lambda"], &rows)?;
    Ok(())
}
