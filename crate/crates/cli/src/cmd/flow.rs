use std::collections::BTreeMap;
use std::io::BufReader;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use lmcf_core::flow::{csf_evolve, fixtures, monotonicity_audit, CsfOptions, CurveComponent, ImmersedCurve};
use lmcf_core::geom::records::read_records;

use super::check;
use crate::config::RunConfig;
use crate::output::Sink;
use crate::CliError;

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Fixture {
    Circle,
    Line,
    /// Two-line cone desingularized by the hyperbola xy = c.
    TwolineDesing,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Audit {
    None,
    Huisken,
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    /// Built-in initial curve.
    #[arg(long, value_enum, conflicts_with = "input")]
    pub fixture: Option<Fixture>,
    /// Sampled-curve record file (jsonl); header meta "closed" lists closed components.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Initial circle radius.
    #[arg(long = "R0", default_value_t = 1.0)]
    pub r0: f64,
    /// Time step.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Final time; defaults depend on the fixture.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Circle vertex count.
    #[arg(long, default_value_t = 512)]
    pub vertices: usize,
    /// Neck size c of the desingularized fixture.
    #[arg(long, default_value_t = 0.01)]
    pub c: f64,
    /// Spacing of line and hyperbola samples.
    #[arg(long, default_value_t = 0.005)]
    pub h: f64,
    /// Half width of line and hyperbola fixtures.
    #[arg(long, default_value_t = 10.0)]
    pub extent: f64,
    /// Gaussian density and theta functional audit along the trace.
    #[arg(long, value_enum, default_value = "none")]
    pub audit: Audit,
    /// Kernel center x0 for the audit.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub x0: String,
    /// Kernel time t0 for the audit; defaults to twice the final time.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Keep every k-th state in the trace.
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
}

fn read_curve(path: &PathBuf) -> Result<ImmersedCurve, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let (header, records) = read_records(BufReader::new(f))?;
    if header.n != 1 {
        return Err(CliError::Usage(format!("flow needs curves in C (n = 1), got n = {}", header.n)));
    }
    let closed: Vec<bool> = header
        .meta
        .get("closed")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .unwrap_or_default();
    let mut groups: BTreeMap<usize, Vec<(f64, [f64; 2])>> = BTreeMap::new();
    for r in records {
        groups.entry(r.c).or_default().push((r.s, [r.x[0], r.x[1]]));
    }
    let comps = groups
        .into_iter()
        .map(|(c, mut pts)| {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            CurveComponent::new(pts.into_iter().map(|p| p.1).collect(), closed.get(c).copied().unwrap_or(false))
        })
        .collect::<lmcf_core::Result<Vec<_>>>()?;
    Ok(ImmersedCurve::new(comps, 0.0)?)
}

pub fn run(args: &FlowArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<(), CliError> {
    let (curve, t_default) = match (args.fixture, &args.input) {
        (Some(Fixture::Circle), _) => (fixtures::circle(args.r0, args.vertices)?, 0.4 * args.r0 * args.r0),
        (Some(Fixture::Line), _) => (fixtures::line(0.0, args.extent, args.h)?, 0.1),
        (Some(Fixture::TwolineDesing), _) => (fixtures::hyperbola_pair(args.c, args.extent, args.h)?, 0.25),
        (None, Some(p)) => (read_curve(p)?, 0.1),
        (None, None) => return Err(CliError::Usage("give --fixture or --input".into())),
    };
    let t_end = args.t_end.unwrap_or(t_default);
    let steps = (t_end / args.dt).round() as usize;
    let mut opts = CsfOptions::new(args.dt, steps);
    opts.record_every = args.record_every;
    let mut trace = csf_evolve(&curve, &opts)?;
    let times = trace.times();

    let mut summary = serde_json::Map::new();
    summary.insert("scheme".into(), trace.scheme.clone().into());
    summary.insert("dt".into(), trace.dt.into());
    summary.insert("steps".into(), steps.into());
    summary.insert("singular".into(), serde_json::to_value(&trace.singular).expect("serializes"));

    let mut failure = None;
    if let Some(Fixture::Circle) = args.fixture {
        let radius: Vec<f64> = trace
            .states
            .iter()
            .map(|s| {
                let p = &s.components[0].points;
                p.iter().map(|q| q[0].hypot(q[1])).sum::<f64>() / p.len() as f64
            })
            .collect();
        let exact: Vec<f64> = times.iter().map(|t| (args.r0 * args.r0 - 2.0 * t).max(0.0).sqrt()).collect();
        let err = radius.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        summary.insert("radius_error".into(), err.into());
        trace.add_channel("radius", radius)?;
        trace.add_channel("radius_exact", exact)?;
        failure = check("circle radius error", err, cfg.tol("flow_radius")?).err();
    }
    if let Some(Fixture::Line) = args.fixture {
        let offset: Vec<f64> = trace
            .states
            .iter()
            .map(|s| s.components[0].points.iter().map(|p| p[1].abs()).fold(0.0, f64::max))
            .collect();
        trace.add_channel("offset", offset)?;
    }
    if let Audit::Huisken = args.audit {
        let x0 = super::parse_list("x0", &args.x0)?;
        if x0.len() != 2 {
            return Err(CliError::Usage("--x0 needs two coordinates".into()));
        }
        let t0 = args.t0.unwrap_or(2.0 * t_end);
        let a = monotonicity_audit(&trace, [x0[0], x0[1]], t0, 0.0, 1e-12)?;
        trace.add_channel("density", a.density.clone())?;
        trace.add_channel("huisken_rhs", a.huisken_rhs.clone())?;
        trace.add_channel("theta_functional", a.theta_functional.clone())?;
        let mut cum = vec![0.0];
        for r in &a.interval_residual {
            cum.push(cum[cum.len() - 1] + r);
        }
        trace.add_channel("huisken_residual", cum)?;
        summary.insert("density_max_increase".into(), a.density_max_increase.into());
        summary.insert("theta_max_increase".into(), a.theta_max_increase.into());
        summary.insert("huisken_residual".into(), a.huisken_residual.into());
        if failure.is_none() {
            failure = check("density increase", a.density_max_increase, cfg.tol("monotone_slack")?).err();
        }
    }

    let names: Vec<String> = trace.channels.keys().cloned().collect();
    let mut header = vec!["t"];
    header.extend(names.iter().map(|s| s.as_str()));
    let rows: Vec<Vec<f64>> = (0..times.len())
        .map(|i| {
            let mut r = vec![times[i]];
            r.extend(names.iter().map(|k| trace.channels[k][i]));
            r
        })
        .collect();
    sink.csv("channels.csv", &header, &rows)?;
    sink.dat("channels.dat", &header, &rows)?;
    let pts: Vec<Vec<f64>> = trace
        .states
        .iter()
        .flat_map(|s| {
            s.components.iter().enumerate().flat_map(move |(c, k)| {
                k.points.iter().map(move |p| vec![s.t, c as f64, p[0], p[1]])
            })
        })
        .collect();
    sink.dat("states.dat", &["t", "component", "x", "y"], &pts)?;
    summary.insert("channels".into(), serde_json::to_value(&trace.channels).expect("serializes"));
    summary.insert(
        "final_state".into(),
        serde_json::to_value(trace.states.last()).expect("serializes"),
    );
    sink.json("trace.json", &summary)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
