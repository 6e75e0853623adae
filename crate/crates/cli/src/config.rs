use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// The versioned default fixture, compiled in so the binary runs anywhere.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub y_max: f64,
    pub points: usize,
    pub poisson_y_max: f64,
    pub poisson_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub flow: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: GridConfig,
    pub scheme: SchemeConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)
            }
            None => Self::parse(DEFAULT_CONFIG),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some((k, v)) = self.tolerances.iter().find(|(_, v)| !(**v > 0.0)) {
            return Err(CliError::Usage(format!("tolerance '{k}' must be positive, got {v}")));
        }
        if self.scheme.flow != lmcf_core::flow::SCHEME {
            return Err(CliError::Usage(format!(
                "flow scheme '{}' not available; use '{}'",
                self.scheme.flow,
                lmcf_core::flow::SCHEME
            )));
        }
        Ok(())
    }

    pub fn tol(&self, key: &str) -> Result<f64, CliError> {
        self.tolerances
            .get(key)
            .copied()
            .ok_or_else(|| CliError::Usage(format!("config has no tolerance '{key}'")))
    }

    /// sha256 over the config (minus the output directory) and the command
    /// invocation, hex encoded.
    pub fn hash(&self, command: &str, args: &serde_json::Value) -> String {
        let mut h = Sha256::new();
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().map(|o| o.remove("out"));
        h.update(serde_json::to_vec(&v).expect("config serializes"));
        h.update(command.as_bytes());
        h.update(serde_json::to_vec(args).expect("args serialize"));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_fixture_parses() {
        let c = RunConfig::load(None).unwrap();
        assert!(c.tol("roundtrip").unwrap() > 0.0);
        let a = c.hash("lawlor", &serde_json::json!({"a": [1, 1, 1]}));
        let b = c.hash("lawlor", &serde_json::json!({"a": [1, 1, 2]}));
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn negative_tolerance_is_rejected() {
        let text = DEFAULT_CONFIG.replace("roundtrip = 1e-6", "roundtrip = -1.0");
        assert!(matches!(RunConfig::parse(&text), Err(CliError::Usage(_))));
    }
}
