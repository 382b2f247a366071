//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use fockbound_core::verifier::WitnessFamily;
use fockbound_core::{QuadraticKind, ToleranceConfig};
use serde::{Deserialize, Serialize};

use crate::profile::{Profile, StateSpec};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n_max: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub converge: Vec<ConvergeBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diverge: Vec<DivergeBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeBlock {
    pub name: String,
    pub family: QuadraticKind,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub state: StateSpec,
    /// Defaults to `0..=d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Vec<usize>>,
}

impl ConvergeBlock {
    pub fn d(&self, cfg: &ExperimentConfig) -> usize {
        self.d.unwrap_or(cfg.d)
    }

    pub fn n_max(&self, cfg: &ExperimentConfig) -> usize {
        self.n_max.unwrap_or(cfg.n_max)
    }

    pub fn grid(&self, cfg: &ExperimentConfig) -> Vec<usize> {
        self.m_grid
            .clone()
            .unwrap_or_else(|| (0..=self.d(cfg)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergeBlock {
    pub name: String,
    pub family: WitnessFamily,
    #[serde(default)]
    pub profile: Profile,
    /// Defaults to the largest grid entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub m_grid: Vec<usize>,
}

impl DivergeBlock {
    pub fn d(&self) -> usize {
        self.d
            .unwrap_or_else(|| self.m_grid.iter().copied().max().unwrap_or(0))
    }
}

fn check_name(name: &str, seen: &mut Vec<String>) -> Result<(), ConfigError> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if !ok {
        return Err(invalid(format!(
            "block name {name:?} must be nonempty ASCII letters, digits, '-' or '_'"
        )));
    }
    if seen.iter().any(|s| s == name) {
        return Err(invalid(format!("duplicate block name {name:?}")));
    }
    seen.push(name.to_string());
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.d == 0 {
            return Err(invalid("d must be at least 1"));
        }
        if self.n_max < 2 {
            return Err(invalid(
                "n_max must be at least 2 (the suite creates particle pairs)",
            ));
        }
        self.tolerances
            .validate()
            .map_err(|e| invalid(e.to_string()))?;
        let mut seen = Vec::new();
        for b in &self.converge {
            check_name(&b.name, &mut seen)?;
            let (d, n_max) = (b.d(self), b.n_max(self));
            if d == 0 {
                return Err(invalid(format!("{}: d must be at least 1", b.name)));
            }
            if n_max < b.family.headroom() {
                return Err(invalid(format!(
                    "{}: {} needs n_max >= {}",
                    b.name,
                    b.family,
                    b.family.headroom()
                )));
            }
            b.profile
                .validate(d)
                .map_err(|e| invalid(format!("{}: {e}", b.name)))?;
            if b.family == QuadraticKind::Number && b.profile != Profile::Identity {
                return Err(invalid(format!(
                    "{}: the number family takes the identity profile",
                    b.name
                )));
            }
            let top = b.state.top_sector();
            if top + b.family.headroom() > n_max {
                return Err(invalid(format!(
                    "{}: state reaches sector {top}, {} allows at most {}",
                    b.name,
                    b.family,
                    n_max - b.family.headroom()
                )));
            }
            let grid = b.grid(self);
            if grid.is_empty() || grid.iter().any(|&m| m > d) {
                return Err(invalid(format!(
                    "{}: m_grid must be nonempty with entries in 0..={d}",
                    b.name
                )));
            }
        }
        for b in &self.diverge {
            check_name(&b.name, &mut seen)?;
            let d = b.d();
            if b.m_grid.is_empty() || b.m_grid.iter().any(|&m| m == 0 || m > d) {
                return Err(invalid(format!(
                    "{}: m_grid must be nonempty with entries in 1..={d}",
                    b.name
                )));
            }
            b.profile
                .validate(d)
                .map_err(|e| invalid(format!("{}: {e}", b.name)))?;
            if b.family == WitnessFamily::A && !b.profile.is_symmetric() {
                return Err(invalid(format!(
                    "{}: the a witness needs a symmetric profile",
                    b.name
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
        ExperimentConfig::from_toml_str(text, Path::new("test.toml"))
    }

    #[test]
    fn minimal_config_uses_default_tolerances() {
        let cfg = parse("d = 3\nn_max = 2\nseed = 9\n").unwrap();
        assert_eq!(cfg.tolerances, ToleranceConfig::default());
        assert!(cfg.converge.is_empty());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(parse("d = 0\nn_max = 2\nseed = 1\n").is_err());
        assert!(parse("d = 2\nn_max = 1\nseed = 1\n").is_err());
        assert!(parse("d = 2\nn_max = 2\nseed = 1\nbogus = 3\n").is_err());
        assert!(parse("d = 2\nn_max = 2\nseed = 1\n[tolerances]\nbound_slack = -1.0\n").is_err());
        let dup = r#"
d = 2
n_max = 2
seed = 1
[[diverge]]
name = "x"
family = "a"
m_grid = [1, 2]
[[diverge]]
name = "x"
family = "c"
m_grid = [1, 2]
"#;
        assert!(parse(dup).is_err());
    }

    #[test]
    fn delta_plus_block_needs_headroom() {
        let text = r#"
d = 2
n_max = 2
seed = 1
[[converge]]
name = "pairs"
family = "delta-plus"
n_max = 1
state = { kind = "vacuum" }
"#;
        assert!(matches!(parse(text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn zero_tolerance_is_accepted() {
        let cfg =
            parse("d = 2\nn_max = 2\nseed = 1\n[tolerances]\nidentity_rel_tol = 0.0\n").unwrap();
        assert_eq!(cfg.tolerances.identity_rel_tol, 0.0);
    }

    #[test]
    fn toml_roundtrip() {
        let text = r#"
d = 4
n_max = 3
seed = 5
[[converge]]
name = "dg"
family = "dgamma"
profile = { kind = "diagonal", exponent = -1.0 }
state = { kind = "random", sectors = [2] }
m_grid = [0, 2, 4]
[[diverge]]
name = "b"
family = "b"
profile = { kind = "diagonal", exponent = 1.0 }
m_grid = [1, 2, 4]
"#;
        let cfg = parse(text).unwrap();
        let again = parse(&toml::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
