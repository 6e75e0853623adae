pub mod drift;
pub mod flow;
pub mod lawlor;
pub mod poisson;
pub mod potential;
pub mod spectrum;

use crate::CliError;

/// Comma-separated floats, e.g. "1,1,1" or "0.5,-1e-3".
pub fn parse_list(name: &str, s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{name}: '{t}' is not a number")))
        })
        .collect()
}

pub fn check(what: &str, value: f64, tol: f64) -> Result<(), CliError> {
    if value <= tol {
        Ok(())
    } else {
        Err(CliError::Tolerance(format!("{what} = {value:.3e} above {tol:.3e}")))
    }
}
