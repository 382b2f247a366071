//! Numeric checks for the identities, bounds, operator inequalities and
//! convergence statements satisfied by the quadratic operators.
//!
//! Every check reports a [`CheckResult`] whose `passed` flag is exactly
//! `residual <= tolerance`. Random inputs come from per-check streams
//! derived from a master seed and the check name.

use serde::{Deserialize, Serialize};

use crate::fock::{FockBasis, FockVector};
use crate::rng::FockRng;

pub mod bounds;
pub mod convergence;
pub mod identities;
pub mod psd;
pub mod suite;

pub use bounds::{
    bound_ratio, check_bound_delta, check_bound_deltaplus, check_bound_dgamma, check_bound_number,
    BoundReport,
};
pub use convergence::{
    convergence_curve, diagonal_profile, divergence_witness, ConvergenceCurve, WitnessCurve,
    WitnessFamily,
};
pub use psd::{psd_form_check, CauchySchwarzVariant, PsdCheck, PsdForm, PsdParams, Sign};
pub use suite::{run_full_suite, run_suite_with_ladder};

/// Tolerance for sector ladder norms, adjoint/symmetry/ONS-independence
/// residuals, commutators and sharpness witnesses.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Bound samples whose right-hand side falls below this are skipped.
pub const RHS_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckResult {
    /// Non-finite residuals are recorded as `f64::MAX` and fail.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let residual = if residual.is_finite() {
            residual
        } else {
            f64::MAX
        };
        Self {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

/// `|x - y| / max(|y|, floor)`.
pub(crate) fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// A random normalized state supported on sectors `0..=max_sector`: half the
/// draws fill every sector, half fill a single random sector.
pub(crate) fn random_state(
    basis: &std::sync::Arc<FockBasis>,
    max_sector: usize,
    rng: &mut FockRng,
) -> FockVector {
    use rand::Rng;
    let sectors: Vec<usize> = if rng.random_bool(0.5) {
        (0..=max_sector).collect()
    } else {
        vec![rng.random_range(0..=max_sector)]
    };
    FockVector::random(basis, &sectors, rng).expect("sectors are within the truncation")
}
