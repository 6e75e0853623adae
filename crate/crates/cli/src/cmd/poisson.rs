use clap::Args;
use serde::Serialize;

use lmcf_core::lawlor::GridSpec;
use lmcf_core::poisson::{manufactured_convergence, model_rhs, perturb_neck, solve_equivariant_poisson, symmetric_neck};

use crate::config::RunConfig;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Args, Serialize)]
pub struct PoissonArgs {
    /// Decay rate of the solution, in (2 - n, 0).
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub rho: f64,
    /// Dimension of the neck.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Symmetric neck parameter a.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Run the manufactured-solution refinement study.
    #[arg(long)]
    pub manufactured: bool,
    /// Grid sizes for the refinement study.
    #[arg(long, default_value = "201,401,801")]
    pub levels: String,
    /// Perturbation size; runs the delta, delta/2, delta/4 ladder.
    #[arg(long)]
    pub delta: Option<f64>,
}

pub fn run(args: &PoissonArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let y_max = cfg.grid.poisson_y_max;
    if args.manufactured {
        let levels: Vec<usize> = super::parse_list("levels", &args.levels)?
            .into_iter()
            .map(|v| v as usize)
            .collect();
        let t = manufactured_convergence(args.n, args.a, args.rho, y_max, &levels)?;
        sink.json("convergence.json", &t)?;
        let rows: Vec<Vec<f64>> = (0..t.points.len())
            .map(|i| vec![t.points[i] as f64, t.h[i], t.error[i]])
            .collect();
        sink.csv("convergence.csv", &["points", "h", "error"], &rows)?;
        let need = cfg.tol("poisson_order")?;
        if t.order < need {
            return Err(CliError::Tolerance(format!("observed order {:.3} below {need}", t.order)));
        }
        return Ok(());
    }
    let grid = GridSpec {
        y_max,
        points: cfg.grid.poisson_points,
        stretch: None,
    };
    let neck = symmetric_neck(args.n, args.a, &grid)?;
    let rhs = model_rhs(&neck, args.rho, 1.0)?;
    let sol = solve_equivariant_poisson(&neck, &rhs, args.rho)?;
    let rows: Vec<Vec<f64>> = (0..neck.len())
        .map(|i| vec![neck.y[i], sol.u.radius[i], sol.u.u[i], rhs.u[i]])
        .collect();
    sink.dat("solution.dat", &["y", "r", "u", "rhs"], &rows)?;
    sink.json(
        "solution.json",
        &serde_json::json!({
            "rho": sol.rho,
            "rate": sol.rate,
            "rhs_rate": sol.rhs_rate,
            "residual": sol.residual,
            "y_sensitivity": sol.y_sensitivity,
            "norms": sol.u.norms,
            "grid": grid,
        }),
    )?;
    if let Some(delta) = args.delta {
        let (_, report) = perturb_neck(&neck, &sol.u, delta)?;
        sink.json("angle.json", &report)?;
        let (lo, hi) = (cfg.tol("ladder_low")?, cfg.tol("ladder_high")?);
        if let Some(q) = report.ratios.iter().find(|q| !(**q >= lo && **q <= hi)) {
            return Err(CliError::Tolerance(format!("remainder ratio {q:.3} outside [{lo}, {hi}]")));
        }
    }
    Ok(())
}
