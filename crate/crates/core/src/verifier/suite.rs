//! The complete deterministic verification run.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;

use super::bounds::{bound_ratio, sample_on};
use super::convergence::{convergence_curve, diagonal_profile, divergence_witness, WitnessFamily};
use super::identities::{
    adjoint_delta_plus_check, adjoint_dgamma_check, alpha_norm_checks, ccr_checks,
    commutator_checks, conjugation_check, cross_path_checks, half_power_checks, ladder_norm_checks,
    ons_independence_checks, permanent_formula_check, sector_orthogonality_check,
    transpose_symmetry_checks,
};
use super::psd::{psd_form_check, PsdForm, PsdParams};
use super::{random_state, CheckResult, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockVector, LadderWeight};
use crate::oneparticle::{OneParticleOperator, OrthonormalSystem};
use crate::quadratic::{vacuum_pair_norm_formula, QuadraticKind, QuadraticOperatorSpec};
use crate::rng::{derive_seed, stream};
use crate::tolerance::ToleranceConfig;

const CCR_SAMPLES: usize = 200;
const LADDER_VECTORS: usize = 20;
const PERMANENT_TUPLES: usize = 50;
const STATE_SAMPLES: usize = 50;
const OPERATOR_SAMPLES: usize = 20;
const BOUND_SAMPLES: usize = 100;
const MONOTONE_JITTER: f64 = 1e-12;

/// Every check at `(d, n_max)` with the bosonic ladder rule. Requires
/// `n_max >= 2` so that pair creation has room.
pub fn run_full_suite(
    d: usize,
    n_max: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckResult>> {
    run_suite_with_ladder(d, n_max, seed, tol, LadderWeight::BOSONIC)
}

/// [`run_full_suite`] on a basis whose ladder rule is `weight`.
pub fn run_suite_with_ladder(
    d: usize,
    n_max: usize,
    seed: u64,
    tol: &ToleranceConfig,
    weight: LadderWeight,
) -> Result<Vec<CheckResult>> {
    tol.validate()?;
    if n_max < 2 {
        return Err(Error::TruncationOverflow {
            top_sector: 0,
            n_max,
            headroom: 2,
        });
    }
    let basis = FockBasis::with_ladder_weight(d, n_max, weight)?;
    let mut out = Vec::new();
    out.extend(identity_checks(&basis, seed, tol)?);
    out.extend(bound_checks(&basis, seed, tol)?);
    out.extend(psd_checks(&basis, seed, tol)?);
    out.extend(convergence_checks(&basis, seed)?);
    out.extend(divergence_checks(d)?);
    Ok(out)
}

fn identity_checks(
    basis: &Arc<FockBasis>,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut out = Vec::new();
    out.push(conjugation_check(d, seed));
    out.push(sector_orthogonality_check(
        basis,
        STATE_SAMPLES,
        seed,
        tol.identity_rel_tol,
    ));
    out.extend(ccr_checks(basis, CCR_SAMPLES, seed, tol.identity_rel_tol)?);
    out.extend(half_power_checks(
        basis,
        STATE_SAMPLES,
        seed,
        tol.bound_slack,
    )?);
    out.extend(ladder_norm_checks(basis, LADDER_VECTORS, seed)?);
    out.push(permanent_formula_check(
        basis,
        PERMANENT_TUPLES,
        seed,
        tol.identity_rel_tol,
    )?);
    out.extend(alpha_norm_checks(
        basis,
        STATE_SAMPLES,
        seed,
        tol.identity_rel_tol,
    )?);
    out.extend(commutator_checks(basis, STATE_SAMPLES, seed)?);
    out.extend(cross_path_checks(
        basis,
        OPERATOR_SAMPLES,
        seed,
        tol.identity_rel_tol,
    )?);
    out.push(adjoint_dgamma_check(basis, OPERATOR_SAMPLES, seed)?);
    out.push(adjoint_delta_plus_check(basis, OPERATOR_SAMPLES, seed)?);
    out.extend(transpose_symmetry_checks(basis, OPERATOR_SAMPLES, seed)?);
    out.extend(ons_independence_checks(basis, OPERATOR_SAMPLES, seed)?);
    Ok(out)
}

/// Zero-padded `d x d` operator with the given top-left block.
fn padded(d: usize, block: &[Vec<f64>]) -> Result<OneParticleOperator> {
    let mut rows = vec![vec![0.0; d]; d];
    for (r, row) in block.iter().enumerate() {
        rows[r][..row.len()].copy_from_slice(row);
    }
    OneParticleOperator::from_real_rows(&rows)
}

fn occupation(d: usize, head: &[u16]) -> Vec<u16> {
    let mut occ = vec![0; d];
    occ[..head.len()].copy_from_slice(head);
    occ
}

fn witness_ratio(kind: QuadraticKind, coeff: OneParticleOperator, phi: &FockVector) -> Result<f64> {
    let d = coeff.dim();
    let spec = QuadraticOperatorSpec::full(kind, coeff, OrthonormalSystem::canonical(d))?;
    Ok(bound_ratio(&spec, phi)?.unwrap_or(f64::NAN))
}

fn bound_checks(
    basis: &Arc<FockBasis>,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let n_max = basis.n_max();
    let mut rng = stream(seed, "bound.coefficients");
    let mut out = Vec::new();
    for kind in QuadraticKind::ALL {
        let coeff = match kind {
            QuadraticKind::Number => OneParticleOperator::identity(d),
            _ => OneParticleOperator::random(d, &mut rng),
        };
        out.push(sample_on(kind, &coeff, basis, BOUND_SAMPLES, seed)?.to_check(tol.bound_slack));
    }

    let mut sector_rng = stream(seed, "bound.number.sector");
    let phi = FockVector::random(basis, &[n_max], &mut sector_rng)?;
    let r = witness_ratio(
        QuadraticKind::Number,
        OneParticleOperator::identity(d),
        &phi,
    )?;
    let expected = n_max as f64 / (n_max as f64 + 1.0);
    out.push(CheckResult::new(
        "sharpness.number_top_sector",
        (r - expected).abs(),
        STRUCTURAL_TOL,
    ));

    if d >= 2 {
        let swap = padded(d, &[vec![0.0, 1.0], vec![1.0, 0.0]])?;
        let phi = FockVector::basis_state(basis, &occupation(d, &[1, 1]))?;
        let r = witness_ratio(QuadraticKind::DGamma, swap, &phi)?;
        out.push(CheckResult::new(
            "sharpness.dgamma_swap",
            (r - 1.0).abs(),
            STRUCTURAL_TOL,
        ));
    }
    let c = padded(d, &[vec![1.0]])?;
    let r = witness_ratio(
        QuadraticKind::DeltaPlus,
        c.clone(),
        &FockVector::vacuum(basis),
    )?;
    out.push(CheckResult::new(
        "sharpness.delta_plus_vacuum",
        (r - 1.0).abs(),
        STRUCTURAL_TOL,
    ));
    let phi = FockVector::basis_state(basis, &occupation(d, &[2]))?;
    let r = witness_ratio(QuadraticKind::Delta, c, &phi)?;
    out.push(CheckResult::new(
        "sharpness.delta_rank_one",
        (r - 0.5).abs(),
        STRUCTURAL_TOL,
    ));
    Ok(out)
}

fn psd_checks(
    basis: &Arc<FockBasis>,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let top = basis.n_max() - 2;
    let mut out = Vec::new();
    for form in PsdForm::ALL {
        let name = format!("psd.{}", form.name());
        let mut rng = stream(seed, &name);
        let mut worst: Option<CheckResult> = None;
        for n in 0..=top {
            let params = PsdParams {
                a: OneParticleOperator::random(d, &mut rng),
                b: OneParticleOperator::random(d, &mut rng),
                ons: OrthonormalSystem::random(
                    d,
                    d,
                    derive_seed(seed, &format!("{name}.ons.{n}")),
                )?,
                m: rng.random_range(1..=d),
            };
            let check = psd_form_check(form, &params, basis, n, tol.psd_eig_tol)?;
            let r = check.result;
            let replace = match &worst {
                None => true,
                Some(w) => (r.passed, -r.residual) < (w.passed, -w.residual),
            };
            if replace {
                let witness = format!("sector {n}, M = {}", params.m);
                worst = Some(CheckResult {
                    witness: Some(witness),
                    ..r
                });
            }
        }
        if let Some(w) = worst {
            out.push(CheckResult { name, ..w });
        }
    }

    let equality = PsdParams {
        a: OneParticleOperator::identity(d),
        b: OneParticleOperator::identity(d),
        ons: OrthonormalSystem::random(d, d, derive_seed(seed, "psd.equality.ons"))?,
        m: d,
    };
    for (form, name) in [
        (
            PsdForm::BasicEstimate,
            "psd.basic_estimate.identity_equality",
        ),
        (
            PsdForm::TechnicalSecond,
            "psd.technical.second.complete_equality",
        ),
    ] {
        let mut worst = 0.0f64;
        for n in 0..=top {
            let c = psd_form_check(form, &equality, basis, n, tol.psd_eig_tol)?;
            worst = worst.max(c.diff_norm / c.scale);
        }
        out.push(CheckResult::new(name, worst, STRUCTURAL_TOL));
    }
    Ok(out)
}

/// `||sum_occ (sum_{j>M} lambda_j n_j) c_occ |occ>||` for diagonal `B`
/// in the canonical ONS.
fn diagonal_dgamma_tail(lambda: &[f64], phi: &FockVector, m: usize) -> f64 {
    let basis = phi.basis();
    phi.coefficients()
        .iter()
        .enumerate()
        .map(|(rank, c)| {
            let occ = basis.occupation(rank);
            let w: f64 = (m..lambda.len())
                .map(|j| lambda[j] * f64::from(occ[j]))
                .sum();
            (c * C64::new(w, 0.0)).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

fn convergence_checks(basis: &Arc<FockBasis>, seed: u64) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let n_max = basis.n_max();
    let ons = OrthonormalSystem::canonical(d);
    let profile = diagonal_profile(d, -1.0, 1.0)?;
    let lambda: Vec<f64> = (1..=d).map(|j| 1.0 / j as f64).collect();
    let grid: Vec<usize> = (0..=d).collect();
    let mut out = Vec::new();
    for kind in QuadraticKind::ALL {
        let label = format!("convergence.{}", kind.name());
        let mut rng = stream(seed, &label);
        let phi = match kind {
            QuadraticKind::DeltaPlus => FockVector::vacuum(basis),
            _ => random_state(basis, n_max, &mut rng),
        };
        let coeff = match kind {
            QuadraticKind::Number => OneParticleOperator::identity(d),
            _ => profile.clone(),
        };
        let curve = convergence_curve(kind, &coeff, &ons, &phi, &grid, seed)?;
        out.push(CheckResult::new(
            format!("{label}.final"),
            curve.final_error(),
            1e-12,
        ));
        // The pair images a_j a_j phi overlap for a superposition, so the
        // Delta tail is only monotone on an occupation basis state.
        let monotone = match kind {
            QuadraticKind::Delta => {
                let rank = rng.random_range(basis.sector_range(n_max));
                let occupation = basis.occupation(rank).to_vec();
                let state = FockVector::basis_state(basis, &occupation)?;
                convergence_curve(kind, &coeff, &ons, &state, &grid, seed)?
            }
            _ => curve.clone(),
        };
        out.push(CheckResult::new(
            format!("{label}.monotone"),
            monotone.max_increase(),
            MONOTONE_JITTER,
        ));
        match kind {
            QuadraticKind::DGamma => {
                let worst = grid
                    .iter()
                    .zip(&curve.errors)
                    .map(|(&m, e)| (e - diagonal_dgamma_tail(&lambda, &phi, m)).abs())
                    .fold(0.0, f64::max);
                out.push(CheckResult::new(
                    format!("{label}.tail"),
                    worst,
                    STRUCTURAL_TOL,
                ));
            }
            QuadraticKind::DeltaPlus => {
                let mut worst = 0.0f64;
                for (&m, e) in grid.iter().zip(&curve.errors) {
                    let tail = if m == d {
                        0.0
                    } else {
                        vacuum_pair_norm_formula(&profile, &ons, m + 1, d)?
                    };
                    worst = worst.max((e * e - tail).abs());
                }
                out.push(CheckResult::new(
                    format!("{label}.tail"),
                    worst,
                    STRUCTURAL_TOL,
                ));
            }
            _ => {}
        }
    }
    Ok(out)
}

/// `1, 2, 4, ...` below `d`, then `d`.
pub(crate) fn doubling_grid(d: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = std::iter::successors(Some(1usize), |m| m.checked_mul(2))
        .take_while(|&m| m < d)
        .collect();
    grid.push(d);
    grid
}

fn divergence_checks(d: usize) -> Result<Vec<CheckResult>> {
    let grid = doubling_grid(d);
    let mut out = Vec::new();
    for (family, coeff) in [
        (WitnessFamily::B, diagonal_profile(d, 1.0, 1.0)?),
        (WitnessFamily::A, OneParticleOperator::identity(d)),
        (WitnessFamily::C, OneParticleOperator::identity(d)),
    ] {
        let w = divergence_witness(family, &coeff, &grid)?;
        let label = format!("divergence.{}", family.name());
        out.push(CheckResult::new(
            format!("{label}.closed_form"),
            w.max_closed_form_residual(),
            STRUCTURAL_TOL,
        ));
        let increasing = if w.strictly_increasing() { 0.0 } else { 1.0 };
        out.push(CheckResult::new(
            format!("{label}.increasing"),
            increasing,
            0.0,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_space_passes() {
        let results = run_full_suite(2, 2, 7, &ToleranceConfig::default()).unwrap();
        for r in &results {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn deterministic() {
        let tol = ToleranceConfig::default();
        let a = run_full_suite(3, 3, 5, &tol).unwrap();
        let b = run_full_suite(3, 3, 5, &tol).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tampered_ladder_fails_ccr() {
        let tol = ToleranceConfig::default();
        let results = run_suite_with_ladder(3, 3, 1, &tol, LadderWeight(f64::from)).unwrap();
        let ccr = results
            .iter()
            .find(|r| r.name == "ccr.canonical_commutator")
            .unwrap();
        assert!(!ccr.passed);
    }

    #[test]
    fn small_spaces_pass_for_many_seeds() {
        let tol = ToleranceConfig::default();
        for (d, n_max) in [(2, 2), (3, 2), (3, 3)] {
            for seed in 0..6 {
                for r in run_full_suite(d, n_max, seed, &tol).unwrap() {
                    assert!(r.passed, "d={d} n_max={n_max} seed={seed}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn needs_pair_headroom() {
        assert!(run_full_suite(3, 1, 1, &ToleranceConfig::default()).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(doubling_grid(1), vec![1]);
        assert_eq!(doubling_grid(6), vec![1, 2, 4, 6]);
        assert_eq!(doubling_grid(8), vec![1, 2, 4, 8]);
    }
}
