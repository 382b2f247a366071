use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    /// Relative residual allowed for algebraic identities.
    #[serde(default = "default_identity")]
    pub identity_rel_tol: f64,
    /// Relative floor for the smallest eigenvalue of a PSD form.
    #[serde(default = "default_psd")]
    pub psd_eig_tol: f64,
    /// Slack on bound ratios: pass when `ratio <= 1 + bound_slack`.
    #[serde(default = "default_slack")]
    pub bound_slack: f64,
}

fn default_identity() -> f64 {
    1e-11
}
fn default_psd() -> f64 {
    1e-9
}
fn default_slack() -> f64 {
    1e-10
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            identity_rel_tol: default_identity(),
            psd_eig_tol: default_psd(),
            bound_slack: default_slack(),
        }
    }
}

impl ToleranceConfig {
    /// Rejects negative or non-finite values. Zero is allowed and turns
    /// every check into an exactness test.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("identity_rel_tol", self.identity_rel_tol),
            ("psd_eig_tol", self.psd_eig_tol),
            ("bound_slack", self.bound_slack),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }
}
