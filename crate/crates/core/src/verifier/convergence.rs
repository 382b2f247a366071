//! Strong convergence of partial sums on a fixed state, and divergence
//! witnesses along growing truncation indices.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_basis, FockVector};
use crate::oneparticle::{OneParticleOperator, OrthonormalSystem};
use crate::quadratic::{
    apply_partial, apply_partial_adjoint, assemble_sector_matrix, omega_formula,
    vacuum_pair_norm_formula, QuadraticKind, QuadraticOperatorSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCurve {
    pub family: QuadraticKind,
    pub d: usize,
    pub n_max: usize,
    pub seed: u64,
    pub m_values: Vec<usize>,
    /// `||partial(M) Phi - partial(len) Phi||`.
    pub errors: Vec<f64>,
}

impl ConvergenceCurve {
    pub fn final_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(0.0)
    }

    /// Largest increase between consecutive grid points.
    pub fn max_increase(&self) -> f64 {
        self.errors
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// `diag(scale * j^exponent)`, `j = 1..=d`.
pub fn diagonal_profile(d: usize, exponent: f64, scale: f64) -> Result<OneParticleOperator> {
    let entries: Vec<f64> = (1..=d).map(|j| scale * (j as f64).powf(exponent)).collect();
    OneParticleOperator::real_diagonal(&entries)
}

fn check_grid(grid: &[usize], len: usize, min: usize) -> Result<()> {
    for &m in grid {
        if m > len {
            return Err(Error::IndexOutOfRange { m, len });
        }
        if m < min {
            return Err(Error::InvalidRange {
                from: m,
                to: m,
                len,
            });
        }
    }
    Ok(())
}

/// Errors of the partial sums of `kind` on `phi` along `m_grid`, measured
/// against the sum over the whole of `ons`. `seed` is recorded as metadata.
pub fn convergence_curve(
    kind: QuadraticKind,
    coeff: &OneParticleOperator,
    ons: &OrthonormalSystem,
    phi: &FockVector,
    m_grid: &[usize],
    seed: u64,
) -> Result<ConvergenceCurve> {
    check_grid(m_grid, ons.len(), 0)?;
    let full = QuadraticOperatorSpec::full(kind, coeff.clone(), ons.clone())?;
    let target = apply_partial(&full, phi)?;
    let errors = m_grid
        .iter()
        .map(|&m| Ok(apply_partial(&full.with_m(m)?, phi)?.sub(&target)?.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceCurve {
        family: kind,
        d: ons.dim(),
        n_max: phi.basis().n_max(),
        seed,
        m_values: m_grid.to_vec(),
        errors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    /// Operator norm of `dGamma_M(B)` on the one-particle sector.
    B,
    /// `||Delta_M(A) Phi_M||` with `Phi_M = Delta_M(A)* Omega / ||.||`.
    A,
    /// `||Delta+_M(C) Omega||^2`.
    C,
}

impl WitnessFamily {
    pub fn name(self) -> &'static str {
        match self {
            WitnessFamily::B => "b",
            WitnessFamily::A => "a",
            WitnessFamily::C => "c",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCurve {
    pub family: WitnessFamily,
    pub d: usize,
    pub m_values: Vec<usize>,
    pub values: Vec<f64>,
    /// `||B P_M||`, `omega_M^(1/2)` or the vacuum pair formula.
    pub closed_form: Vec<f64>,
}

impl WitnessCurve {
    pub fn max_closed_form_residual(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.closed_form)
            .map(|(v, c)| (v - c).abs())
            .fold(0.0, f64::max)
    }

    pub fn strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }

    /// `last / first`, or 0 when the curve is empty or starts at zero.
    pub fn growth_factor(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(&f), Some(&l)) if f > 0.0 => l / f,
            _ => 0.0,
        }
    }
}

fn largest_singular_value(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.singular_values().max()
    }
}

/// Witness values of `family` for `coeff` along `m_grid` (entries in
/// `1..=d`), canonical ONS, two-particle truncation.
pub fn divergence_witness(
    family: WitnessFamily,
    coeff: &OneParticleOperator,
    m_grid: &[usize],
) -> Result<WitnessCurve> {
    let d = coeff.dim();
    check_grid(m_grid, d, 1)?;
    let ons = OrthonormalSystem::canonical(d);
    let basis = build_basis(d, 2)?;
    let vacuum = FockVector::vacuum(&basis);
    let mut values = Vec::with_capacity(m_grid.len());
    let mut closed_form = Vec::with_capacity(m_grid.len());
    for &m in m_grid {
        match family {
            WitnessFamily::B => {
                let spec = QuadraticOperatorSpec::dgamma(coeff.clone(), ons.clone(), m)?;
                values.push(largest_singular_value(&assemble_sector_matrix(
                    &spec, &basis, 1,
                )?));
                closed_form.push(coeff.restricted_to(&ons, m)?.operator_norm());
            }
            WitnessFamily::A => {
                let omega = omega_formula(coeff, &ons, m)?;
                let spec = QuadraticOperatorSpec::delta(coeff.clone(), ons.clone(), m)?;
                let up = apply_partial_adjoint(&spec, &vacuum)?;
                let norm = up.norm();
                let value = if norm == 0.0 {
                    0.0
                } else {
                    apply_partial(&spec, &up.scaled(C64::new(1.0 / norm, 0.0)))?.norm()
                };
                values.push(value);
                closed_form.push(omega.sqrt());
            }
            WitnessFamily::C => {
                let spec = QuadraticOperatorSpec::delta_plus(coeff.clone(), ons.clone(), m)?;
                values.push(apply_partial(&spec, &vacuum)?.norm_sqr());
                closed_form.push(vacuum_pair_norm_formula(coeff, &ons, 1, m)?);
            }
        }
    }
    Ok(WitnessCurve {
        family,
        d,
        m_values: m_grid.to_vec(),
        values,
        closed_form,
    })
}
