//! `lmcf`: command-line runs for the Lagrangian mean curvature flow laboratory.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical-tolerance failure,
//! 4 model-assumption violation.

mod cmd;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lmcf_core::{ErrorClass, LabError};

use config::RunConfig;
use output::Sink;

#[derive(Debug, Parser)]
#[command(name = "lmcf", version, about = "Lawlor necks, cone spectra, curve flows and potential audits")]
struct Cli {
    /// TOML run configuration; defaults to the bundled configs/default.toml.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root; a subdirectory per command is created below it.
    #[arg(long, global = true, env = "LMCF_OUT")]
    out: Option<PathBuf>,
    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lawlor neck parameters, profile, potential and special residual.
    Lawlor(cmd::lawlor::LawlorArgs),
    /// Curve shortening flow of a fixture or record file with audits.
    Flow(cmd::flow::FlowArgs),
    /// Link spectrum and stability accounting of a cone.
    Spectrum(cmd::spectrum::SpectrumArgs),
    /// Drift heat expansions and three-annulus checks.
    Drift(cmd::drift::DriftArgs),
    /// Weighted Poisson problem on a symmetric neck.
    Poisson(cmd::poisson::PoissonArgs),
    /// Potentials, strips, Floer degrees and compactified ends.
    Potential(cmd::potential::PotentialArgs),
    /// Write roff manual pages for lmcf and every command.
    #[command(hide = true)]
    Man {
        #[arg(long, default_value = "man")]
        dir: PathBuf,
    },
}

/// (file name, roff source) for lmcf.1 and one lmcf-<command>.1 per command.
fn man_pages() -> Vec<(String, Vec<u8>)> {
    use clap::CommandFactory;
    let mut top = Cli::command();
    top.build();
    let render = |c: clap::Command| {
        let mut buf = Vec::new();
        clap_mangen::Man::new(c).render(&mut buf).expect("render to memory");
        buf
    };
    let mut pages = vec![("lmcf.1".to_string(), render(top.clone()))];
    for sub in top.get_subcommands().filter(|s| !s.is_hide_set() && s.get_name() != "help") {
        let name = format!("lmcf-{}", sub.get_name());
        pages.push((format!("{name}.1"), render(sub.clone().name(name).bin_name(format!("lmcf {}", sub.get_name())))));
    }
    pages
}

fn write_man(dir: &std::path::Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    for (name, body) in man_pages() {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// A computed check exceeded its configured tolerance.
    Tolerance(String),
    Lab(LabError),
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Lab(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Lab(e) => match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Tolerance => 3,
                ErrorClass::Model => 4,
            },
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m.clone()),
            CliError::Io(m) => ("io", m.clone()),
            CliError::Tolerance(m) => ("tolerance", m.clone()),
            CliError::Lab(e) => (e.kind(), e.to_string()),
        };
        serde_json::json!({ "error": kind, "exit_code": self.code(), "message": message })
    }
}

fn run(cli: Cli) -> Result<(), (CliError, Option<Sink>)> {
    let mut cfg = RunConfig::load(cli.config.as_deref()).map_err(|e| (e, None))?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    let (name, args) = match &cli.command {
        Command::Lawlor(a) => ("lawlor", serde_json::to_value(a)),
        Command::Flow(a) => ("flow", serde_json::to_value(a)),
        Command::Spectrum(a) => ("spectrum", serde_json::to_value(a)),
        Command::Drift(a) => ("drift", serde_json::to_value(a)),
        Command::Poisson(a) => ("poisson", serde_json::to_value(a)),
        Command::Potential(a) => ("potential", serde_json::to_value(a)),
        Command::Man { dir } => return write_man(dir).map_err(|e| (e, None)),
    };
    let args = args.expect("arguments serialize");
    let hash = cfg.hash(name, &args);
    let mut sink = Sink::new(cfg.out.join(name), name, hash, cfg.seed).map_err(|e| (e, None))?;
    let r = match &cli.command {
        Command::Lawlor(a) => cmd::lawlor::run(a, &cfg, &mut sink),
        Command::Flow(a) => cmd::flow::run(a, &cfg, &mut sink),
        Command::Spectrum(a) => cmd::spectrum::run(a, &cfg, &mut sink),
        Command::Drift(a) => cmd::drift::run(a, &cfg, &mut sink),
        Command::Poisson(a) => cmd::poisson::run(a, &cfg, &mut sink),
        Command::Potential(a) => cmd::potential::run(a, &cfg, &mut sink),
        Command::Man { .. } => unreachable!("handled above"),
    };
    match r {
        Ok(()) => {
            for p in &sink.written {
                println!("{}", p.display());
            }
            Ok(())
        }
        Err(e) => Err((e, Some(sink))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((e, sink)) => {
            let mut body = e.to_json();
            if let Some(mut s) = sink {
                body["config_hash"] = s.hash.clone().into();
                body["seed"] = s.seed.into();
                if let Err(w) = s.json("error.json", &body) {
                    log::warn!("could not write error.json: {w:?}");
                }
            }
            eprintln!("{body}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn committed_man_pages_are_current() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("man");
        for (name, body) in man_pages() {
            let on_disk = std::fs::read(dir.join(&name)).unwrap_or_default();
            assert!(on_disk == body, "{name} is stale; run `lmcf man --dir crates/cli/man`");
        }
    }
}
