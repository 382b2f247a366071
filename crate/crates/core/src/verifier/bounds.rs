//! Number-operator bounds for the partial sums, sampled over random states,
//! random complete orthonormal systems and random truncation indices.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{random_state, CheckResult, RHS_FLOOR};
use crate::error::{Error, Result};
use crate::fock::{alpha_norm, build_basis, FockBasis, FockVector};
use crate::oneparticle::{OneParticleOperator, OrthonormalSystem};
use crate::quadratic::{apply_partial, QuadraticKind, QuadraticOperatorSpec};
use crate::rng::{derive_seed, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: String,
    pub samples: usize,
    pub skipped: usize,
    pub max_ratio: f64,
    pub witness: String,
}

impl BoundReport {
    /// `residual = max(0, max_ratio - 1)` against `slack`.
    pub fn to_check(&self, slack: f64) -> CheckResult {
        CheckResult::new(
            format!("bound.{}", self.family),
            (self.max_ratio - 1.0).max(0.0),
            slack,
        )
        .with_witness(self.witness.clone())
    }
}

/// `sqrt(sum_n w(n) ||Phi^(n)||^2)` squared.
fn weighted_sqr(phi: &FockVector, w: impl Fn(f64) -> f64) -> f64 {
    phi.sector_weighted_norm(|n| w(n as f64)).powi(2)
}

/// Bound ratio `LHS / RHS` for one partial sum and one state, or `None`
/// when the right-hand side is below the floor.
///
/// * Number: `||N_M Phi|| / ||Phi||_1`
/// * DGamma: `||dGamma_M(B) Phi|| / (||B|| ||N Phi||)`
/// * Delta: `||Delta_M(A) Phi||^2 / (||A||^2 ||N Phi||^2 + (||A||_2^2 - ||A||^2) ||N^(1/2) Phi||^2)`
/// * DeltaPlus: `||Delta+_M(C) Phi||^2 / (||C||^2 ||(N(N+2))^(1/2) Phi||^2 + ||C||_2^2 ||(N+2)^(1/2) Phi||^2)`
pub fn bound_ratio(spec: &QuadraticOperatorSpec, phi: &FockVector) -> Result<Option<f64>> {
    let image = apply_partial(spec, phi)?;
    let op = spec.coeff().operator_norm();
    let hs = spec.coeff().hs_norm();
    let (lhs, rhs) = match spec.kind() {
        QuadraticKind::Number => (image.norm(), alpha_norm(phi, 1.0)),
        QuadraticKind::DGamma => (image.norm(), op * weighted_sqr(phi, |n| n * n).sqrt()),
        QuadraticKind::Delta => (
            image.norm_sqr(),
            op * op * weighted_sqr(phi, |n| n * n)
                + (hs * hs - op * op).max(0.0) * weighted_sqr(phi, |n| n),
        ),
        QuadraticKind::DeltaPlus => (
            image.norm_sqr(),
            op * op * weighted_sqr(phi, |n| n * (n + 2.0))
                + hs * hs * weighted_sqr(phi, |n| n + 2.0),
        ),
    };
    if rhs < RHS_FLOOR {
        return Ok(None);
    }
    Ok(Some(lhs / rhs))
}

fn sample(
    kind: QuadraticKind,
    coeff: &OneParticleOperator,
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let d = coeff.dim();
    let label = format!("bound.{}", kind.name());
    let mut rng = stream(seed, &label);
    let top = basis.n_max() - kind.headroom();
    let mut report = BoundReport {
        family: kind.name().to_string(),
        samples,
        skipped: 0,
        max_ratio: 0.0,
        witness: String::new(),
    };
    for s in 0..samples {
        let ons = OrthonormalSystem::random(d, d, derive_seed(seed, &format!("{label}.ons.{s}")))?;
        let m = rng.random_range(0..=d);
        let phi = random_state(basis, top, &mut rng);
        let spec = QuadraticOperatorSpec::new(kind, coeff.clone(), ons, m)?;
        match bound_ratio(&spec, &phi)? {
            None => report.skipped += 1,
            Some(r) if r > report.max_ratio || report.witness.is_empty() => {
                report.max_ratio = r.max(report.max_ratio);
                report.witness = format!("sample {s}, M = {m}, top sector {:?}", phi.top_sector());
            }
            Some(_) => {}
        }
    }
    Ok(report)
}

fn basis_for(kind: QuadraticKind, d: usize, n_max: usize) -> Result<Arc<FockBasis>> {
    if n_max < kind.headroom() {
        return Err(Error::TruncationOverflow {
            top_sector: 0,
            n_max,
            headroom: kind.headroom(),
        });
    }
    build_basis(d, n_max)
}

/// `||N_M Phi|| <= ||Phi||_1`.
pub fn check_bound_number(
    d: usize,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let basis = basis_for(QuadraticKind::Number, d, n_max)?;
    sample(
        QuadraticKind::Number,
        &OneParticleOperator::identity(d),
        &basis,
        samples,
        seed,
    )
}

/// `||dGamma_M(B) Phi|| <= ||B|| ||N Phi||`; `d` is the dimension of `b`.
pub fn check_bound_dgamma(
    b: &OneParticleOperator,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let basis = basis_for(QuadraticKind::DGamma, b.dim(), n_max)?;
    sample(QuadraticKind::DGamma, b, &basis, samples, seed)
}

/// `||Delta_M(A) Phi||^2 <= ||A||^2 ||N Phi||^2 + (||A||_2^2 - ||A||^2) ||N^(1/2) Phi||^2`.
pub fn check_bound_delta(
    a: &OneParticleOperator,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let basis = basis_for(QuadraticKind::Delta, a.dim(), n_max)?;
    sample(QuadraticKind::Delta, a, &basis, samples, seed)
}

/// `||Delta+_M(C) Phi||^2 <= ||C||^2 ||(N(N+2))^(1/2) Phi||^2 + ||C||_2^2 ||(N+2)^(1/2) Phi||^2`,
/// states drawn on sectors `<= n_max - 2`.
pub fn check_bound_deltaplus(
    c: &OneParticleOperator,
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    let basis = basis_for(QuadraticKind::DeltaPlus, c.dim(), n_max)?;
    sample(QuadraticKind::DeltaPlus, c, &basis, samples, seed)
}

/// Same sampling as the public bound checks, on a caller-provided basis.
pub(crate) fn sample_on(
    kind: QuadraticKind,
    coeff: &OneParticleOperator,
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
) -> Result<BoundReport> {
    if basis.n_max() < kind.headroom() {
        return Err(Error::TruncationOverflow {
            top_sector: 0,
            n_max: basis.n_max(),
            headroom: kind.headroom(),
        });
    }
    sample(kind, coeff, basis, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use num_complex::Complex64 as C64;

    fn ratio(kind: QuadraticKind, coeff: OneParticleOperator, phi: &FockVector) -> Option<f64> {
        let d = coeff.dim();
        let spec =
            QuadraticOperatorSpec::new(kind, coeff, OrthonormalSystem::canonical(d), d).unwrap();
        bound_ratio(&spec, phi).unwrap()
    }

    #[test]
    fn number_ratio_on_a_sector() {
        let basis = build_basis(3, 4).unwrap();
        let mut rng = rng_from_seed(3);
        for n in 1..=4 {
            let phi = FockVector::random(&basis, &[n], &mut rng).unwrap();
            let r = ratio(
                QuadraticKind::Number,
                OneParticleOperator::identity(3),
                &phi,
            )
            .unwrap();
            assert!((r - n as f64 / (n as f64 + 1.0)).abs() < 1e-14);
        }
        let r = ratio(
            QuadraticKind::Number,
            OneParticleOperator::identity(3),
            &FockVector::vacuum(&basis),
        );
        assert_eq!(r, Some(0.0));
    }

    #[test]
    fn sharp_witnesses() {
        let basis = build_basis(2, 4).unwrap();
        let swap = OneParticleOperator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let phi = FockVector::basis_state(&basis, &[1, 1]).unwrap();
        let r = ratio(QuadraticKind::DGamma, swap, &phi).unwrap();
        assert!((r - 1.0).abs() < 1e-12);

        let c = OneParticleOperator::real_diagonal(&[1.0, 0.0]).unwrap();
        let r = ratio(
            QuadraticKind::DeltaPlus,
            c.clone(),
            &FockVector::vacuum(&basis),
        )
        .unwrap();
        assert!((r - 1.0).abs() < 1e-12);

        let phi = FockVector::basis_state(&basis, &[2, 0]).unwrap();
        let r = ratio(QuadraticKind::Delta, c, &phi).unwrap();
        assert!((r - 0.5).abs() < 1e-12);

        let id = OneParticleOperator::identity(2);
        let phi = FockVector::basis_state(&basis, &[2, 1]).unwrap();
        let r = ratio(QuadraticKind::DGamma, id, &phi).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coefficients_and_vacuum_are_skipped_or_zero() {
        let basis = build_basis(2, 3).unwrap();
        let zero = OneParticleOperator::zeros(2);
        let phi = FockVector::basis_state(&basis, &[1, 0]).unwrap();
        assert_eq!(ratio(QuadraticKind::Delta, zero.clone(), &phi), None);
        assert_eq!(
            ratio(
                QuadraticKind::DGamma,
                OneParticleOperator::identity(2),
                &FockVector::vacuum(&basis)
            ),
            None
        );
        assert_eq!(
            ratio(QuadraticKind::DeltaPlus, zero, &FockVector::vacuum(&basis)),
            None
        );
    }

    #[test]
    fn random_samples_respect_the_bounds() {
        let mut rng = rng_from_seed(11);
        let reports = [
            check_bound_number(3, 4, 60, 1).unwrap(),
            check_bound_dgamma(&OneParticleOperator::random(3, &mut rng), 4, 60, 1).unwrap(),
            check_bound_delta(&OneParticleOperator::random(3, &mut rng), 4, 60, 1).unwrap(),
            check_bound_deltaplus(&OneParticleOperator::random(3, &mut rng), 4, 60, 1).unwrap(),
        ];
        for r in &reports {
            assert!(r.max_ratio <= 1.0 + 1e-10, "{r:?}");
            assert!(r.max_ratio > 0.0);
            assert!(r.to_check(1e-10).passed);
        }
    }

    #[test]
    fn scaled_identity_and_headroom() {
        let basis = build_basis(2, 3).unwrap();
        let b = OneParticleOperator::identity(2).scaled(C64::new(2.0, 0.0));
        let report = sample_on(QuadraticKind::DGamma, &b, &basis, 20, 5).unwrap();
        assert!(report.max_ratio > 0.5 && report.max_ratio <= 1.0 + 1e-12);
        assert!(check_bound_deltaplus(&b, 1, 5, 1).is_err());
    }
}
