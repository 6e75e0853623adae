use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use lmcf_core::drift::{eta_norm, three_annulus_parabolic, ModeExpansion};

use crate::config::RunConfig;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum DriftCheck {
    ThreeAnnulus,
    Norms,
}

#[derive(Debug, Args, Serialize)]
pub struct DriftArgs {
    /// JSON mode expansion.
    #[arg(long)]
    pub expansion: PathBuf,
    /// Elliptic and parabolic dichotomies, or the eta_norm table over time.
    #[arg(long, value_enum, default_value = "three-annulus")]
    pub check: DriftCheck,
    /// Degree d of the dichotomy.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    /// Rate gap in the hypotheses.
    #[arg(long, default_value_t = 0.05)]
    pub lambda1: f64,
    /// Rate gap in the conclusions; must exceed lambda1.
    #[arg(long, default_value_t = 0.1)]
    pub lambda2: f64,
    /// Time horizon for the norms table.
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// Time samples in the norms table.
    #[arg(long, default_value_t = 41)]
    pub samples: usize,
}

pub fn run(args: &DriftArgs, _cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.expansion)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.expansion.display())))?;
    let e: ModeExpansion =
        serde_json::from_str(&text).map_err(|err| CliError::Usage(format!("{}: {err}", args.expansion.display())))?;
    e.validate()?;
    match args.check {
        DriftCheck::ThreeAnnulus => {
            let r = three_annulus_parabolic(&e, args.d, args.lambda1, args.lambda2)?;
            sink.json("three_annulus.json", &r)?;
            if r.dichotomy == Some(false) {
                return Err(CliError::Lab(lmcf_core::LabError::Hypothesis(
                    "dichotomy fails on an expansion without a degree-d term".into(),
                )));
            }
        }
        DriftCheck::Norms => {
            let m = args.samples.max(2);
            let rows: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    let t = args.t_max * i as f64 / (m - 1) as f64;
                    vec![t, eta_norm(&e, t)]
                })
                .collect();
            sink.csv("norms.csv", &["t", "norm"], &rows)?;
            sink.dat("norms.dat", &["t", "norm"], &rows)?;
        }
    }
    Ok(())
}
