//! Exact identities: CCR, sector norms of the ladder operators, the
//! permanent formula for cyclic vectors, alpha-norms, number-operator
//! commutators, oracle cross-paths and the adjoint/symmetry/ONS-independence
//! relations of the completed quadratic operators.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{rel, CheckResult, STRUCTURAL_TOL};
use crate::error::Result;
use crate::fock::{
    alpha_norm, apply_annihilate, apply_create, apply_number_power, build_cyclic_vector,
    ladder_sector_matrix, FockBasis, FockVector, Ladder,
};
use crate::oneparticle::{
    bilinear_pairing, inner_product, permanent, Conjugate, OneParticleOperator, OneParticleVector,
    OrthonormalSystem,
};
use crate::quadratic::{
    apply_partial, assemble_sector_matrix, delta_cyclic_oracle, dgamma_cyclic_oracle,
    QuadraticKind, QuadraticOperatorSpec,
};
use crate::rng::{derive_seed, stream};

pub(crate) fn matrix_residual(x: &DMatrix<C64>, reference: &DMatrix<C64>) -> f64 {
    let diff = (x - reference).norm();
    let scale = reference.norm().max(x.norm());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Commutation relations on states with two free sectors:
/// `[a(f),a(g)] = 0`, `[a+(f),a+(g)] = 0`, `[a(f),a+(g)] = (conj f, g)`.
/// Residuals are normalized by `||f|| ||g|| ||Phi||`.
pub fn ccr_checks(
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let top = basis.n_max().saturating_sub(2);
    let mut rng = stream(seed, "ccr");
    let (mut aa, mut cc, mut ac) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let f = OneParticleVector::random(d, &mut rng);
        let g = OneParticleVector::random(d, &mut rng);
        let phi = super::random_state(basis, top, &mut rng);
        let scale = f.norm() * g.norm() * phi.norm();

        let x = apply_annihilate(&f, &apply_annihilate(&g, &phi)?)?;
        let y = apply_annihilate(&g, &apply_annihilate(&f, &phi)?)?;
        aa = aa.max(x.sub(&y)?.norm() / scale);

        let x = apply_create(&f, &apply_create(&g, &phi)?)?;
        let y = apply_create(&g, &apply_create(&f, &phi)?)?;
        cc = cc.max(x.sub(&y)?.norm() / scale);

        let x = apply_annihilate(&f, &apply_create(&g, &phi)?)?;
        let y = apply_create(&g, &apply_annihilate(&f, &phi)?)?;
        let mut comm = x.sub(&y)?;
        comm.axpy(-bilinear_pairing(&f, &g)?, &phi)?;
        ac = ac.max(comm.norm() / scale);
    }
    Ok(vec![
        CheckResult::new("ccr.annihilators_commute", aa, tol),
        CheckResult::new("ccr.creators_commute", cc, tol),
        CheckResult::new("ccr.canonical_commutator", ac, tol),
    ])
}

/// `||a(f) Phi|| <= ||f|| ||Phi||_{1/2}` and `||a+(f) Phi|| <= ||f|| ||Phi||_{1/2}`
/// on states with one free sector; residual `max(0, ratio - 1)`.
pub fn half_power_checks(
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
    slack: f64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let top = basis.n_max().saturating_sub(1);
    let mut rng = stream(seed, "half_power");
    let (mut down, mut up) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let f = OneParticleVector::random(d, &mut rng);
        let phi = super::random_state(basis, top, &mut rng);
        let rhs = f.norm() * alpha_norm(&phi, 0.5);
        down = down.max(apply_annihilate(&f, &phi)?.norm() / rhs);
        up = up.max(apply_create(&f, &phi)?.norm() / rhs);
    }
    Ok(vec![
        CheckResult::new("half_power.annihilator", (down - 1.0).max(0.0), slack),
        CheckResult::new("half_power.creator", (up - 1.0).max(0.0), slack),
    ])
}

/// Largest singular value of `a(f)` from sector `n` equals `sqrt(n) ||f||`,
/// and of `a+(f)` equals `sqrt(n+1) ||f||`, for `n = 1..=3` where the
/// truncation allows.
pub fn ladder_norm_checks(
    basis: &Arc<FockBasis>,
    count: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut rng = stream(seed, "ladder.sector_norm");
    let (mut ann, mut cre) = (0.0f64, 0.0f64);
    let top = 3.min(basis.n_max().saturating_sub(1));
    for _ in 0..count {
        let f = OneParticleVector::random(d, &mut rng);
        for n in 1..=top {
            let m = ladder_sector_matrix(basis, &f, Ladder::Annihilate, n)?;
            let s = m.singular_values().max();
            ann = ann.max((s - (n as f64).sqrt() * f.norm()).abs());
            let m = ladder_sector_matrix(basis, &f, Ladder::Create, n)?;
            let s = m.singular_values().max();
            cre = cre.max((s - ((n + 1) as f64).sqrt() * f.norm()).abs());
        }
    }
    Ok(vec![
        CheckResult::new("ladder.annihilate_sector_norm", ann, STRUCTURAL_TOL),
        CheckResult::new("ladder.create_sector_norm", cre, STRUCTURAL_TOL),
    ])
}

/// Fock inner product of two cyclic vectors against the permanent of the
/// Gram matrix `[(f_j, g_k)]`, relative error, `n = 1..=min(5, n_max)`.
pub fn permanent_formula_check(
    basis: &Arc<FockBasis>,
    tuples: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckResult> {
    let d = basis.d();
    let n_top = 5.min(basis.n_max());
    let mut rng = stream(seed, "permanent_formula");
    let mut worst = 0.0f64;
    let mut witness = String::new();
    for t in 0..tuples {
        let n = 1 + t % n_top.max(1);
        let fs: Vec<_> = (0..n)
            .map(|_| OneParticleVector::random(d, &mut rng))
            .collect();
        let gs: Vec<_> = (0..n)
            .map(|_| OneParticleVector::random(d, &mut rng))
            .collect();
        let lhs = build_cyclic_vector(&fs, basis)?.inner(&build_cyclic_vector(&gs, basis)?)?;
        let mut gram = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                gram[(j, k)] = inner_product(&fs[j], &gs[k])?;
            }
        }
        let rhs = permanent(&gram)?;
        let err = (lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
        if err > worst {
            worst = err;
            witness = format!("tuple {t}, n = {n}");
        }
    }
    Ok(CheckResult::new("cyclic.permanent_formula", worst, tol).with_witness(witness))
}

/// `||Phi||_alpha = ||(N + 1)^alpha Phi||`, with `N` once by spectral scaling
/// and once (for `alpha = 1`) as the completed partial sum `N_d`.
pub fn alpha_norm_checks(
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut rng = stream(seed, "alpha_norm");
    let ons = OrthonormalSystem::random(d, d, derive_seed(seed, "alpha_norm.ons"))?;
    let number = QuadraticOperatorSpec::number(ons, d)?;
    let (mut spectral, mut partial) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let phi = super::random_state(basis, basis.n_max(), &mut rng);
        for alpha in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let direct = alpha_norm(&phi, alpha);
            spectral = spectral.max(rel(apply_number_power(&phi, alpha, 1.0).norm(), direct));
        }
        let n_phi = apply_partial(&number, &phi)?;
        let via = n_phi.add(&phi)?.norm();
        partial = partial.max(rel(via, alpha_norm(&phi, 1.0)));
    }
    Ok(vec![
        CheckResult::new("alpha_norm.spectral", spectral, tol),
        CheckResult::new("alpha_norm.number_partial_sum", partial, tol),
    ])
}

/// `[N, a(f)] = -a(f)` and `[N, a+(f)] = a+(f)` with `N` the completed
/// number partial sum over a random ONS. Residuals are normalized by
/// `||f|| ||Phi||_{3/2}`.
pub fn commutator_checks(
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut rng = stream(seed, "commutator");
    let ons = OrthonormalSystem::random(d, d, derive_seed(seed, "commutator.ons"))?;
    let number = QuadraticOperatorSpec::number(ons, d)?;
    let top = basis.n_max().saturating_sub(1);
    let (mut down, mut up) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let f = OneParticleVector::random(d, &mut rng);
        let phi = super::random_state(basis, top, &mut rng);
        let scale = f.norm() * alpha_norm(&phi, 1.5);

        let a_phi = apply_annihilate(&f, &phi)?;
        let lhs = apply_partial(&number, &a_phi)?
            .sub(&apply_annihilate(&f, &apply_partial(&number, &phi)?)?)?;
        down = down.max(lhs.add(&a_phi)?.norm() / scale);

        let c_phi = apply_create(&f, &phi)?;
        let lhs = apply_partial(&number, &c_phi)?
            .sub(&apply_create(&f, &apply_partial(&number, &phi)?)?)?;
        up = up.max(lhs.sub(&c_phi)?.norm() / scale);
    }
    Ok(vec![
        CheckResult::new("commutator.number_annihilator", down, STRUCTURAL_TOL),
        CheckResult::new("commutator.number_creator", up, STRUCTURAL_TOL),
    ])
}

/// Completed `dGamma(B)` and `Delta(A)` on cyclic vectors against the
/// cyclic-vector oracles, relative error, `n <= min(4, n_max)`.
pub fn cross_path_checks(
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let n_top = 4.min(basis.n_max());
    let mut rng = stream(seed, "cross_path");
    let ons = OrthonormalSystem::random(d, d, derive_seed(seed, "cross_path.ons"))?;
    let (mut dg, mut de) = (0.0f64, 0.0f64);
    for s in 0..samples {
        let n = 1 + s % n_top.max(1);
        let fs: Vec<_> = (0..n)
            .map(|_| OneParticleVector::random(d, &mut rng))
            .collect();
        let cyc = build_cyclic_vector(&fs, basis)?;
        let b = OneParticleOperator::random(d, &mut rng);
        let a = OneParticleOperator::random(d, &mut rng);

        let spec = QuadraticOperatorSpec::dgamma(b.clone(), ons.clone(), d)?;
        let oracle = dgamma_cyclic_oracle(&b, &fs, basis)?;
        let got = apply_partial(&spec, &cyc)?;
        dg = dg.max(got.sub(&oracle)?.norm() / oracle.norm().max(f64::MIN_POSITIVE));

        let spec = QuadraticOperatorSpec::delta(a.clone(), ons.clone(), d)?;
        let oracle = delta_cyclic_oracle(&a, &fs, basis)?;
        let got = apply_partial(&spec, &cyc)?;
        let scale = oracle.norm().max(got.norm());
        let err = got.sub(&oracle)?.norm();
        de = de.max(if scale == 0.0 { err } else { err / scale });
    }
    Ok(vec![
        CheckResult::new("cross_path.dgamma_cyclic", dg, tol),
        CheckResult::new("cross_path.delta_cyclic", de, tol),
    ])
}

/// Sectors `n` on which the completed operator of `kind` can be assembled
/// with a nontrivial image.
pub(crate) fn source_sectors(kind: QuadraticKind, n_max: usize) -> Vec<usize> {
    match kind {
        QuadraticKind::Number | QuadraticKind::DGamma => (0..=n_max).collect(),
        QuadraticKind::Delta => (2..=n_max).collect(),
        QuadraticKind::DeltaPlus => (0..=n_max).filter(|n| n + 2 <= n_max).collect(),
    }
}

/// `dGamma(B)^* = dGamma(B^*)` as sector matrices.
pub fn adjoint_dgamma_check(
    basis: &Arc<FockBasis>,
    count: usize,
    seed: u64,
) -> Result<CheckResult> {
    let d = basis.d();
    let mut rng = stream(seed, "adjoint.dgamma");
    let ons = OrthonormalSystem::random(d, d, derive_seed(seed, "adjoint.dgamma.ons"))?;
    let mut worst = 0.0f64;
    for _ in 0..count {
        let b = OneParticleOperator::random(d, &mut rng);
        let fwd = QuadraticOperatorSpec::dgamma(b.clone(), ons.clone(), d)?;
        let adj = QuadraticOperatorSpec::dgamma(b.adjoint(), ons.clone(), d)?;
        for n in source_sectors(QuadraticKind::DGamma, basis.n_max()) {
            let m = assemble_sector_matrix(&fwd, basis, n)?;
            let a = assemble_sector_matrix(&adj, basis, n)?;
            worst = worst.max(matrix_residual(&m.adjoint(), &a));
        }
    }
    Ok(CheckResult::new("adjoint.dgamma", worst, STRUCTURAL_TOL))
}

/// `Delta+(C) = Delta(C^*)^*` for `C^T = C`, sector `n -> n+2` against the
/// adjoint of `n+2 -> n`.
pub fn adjoint_delta_plus_check(
    basis: &Arc<FockBasis>,
    count: usize,
    seed: u64,
) -> Result<CheckResult> {
    let d = basis.d();
    let mut rng = stream(seed, "adjoint.delta_plus");
    let ons = OrthonormalSystem::random(d, d, derive_seed(seed, "adjoint.delta_plus.ons"))?;
    let mut worst = 0.0f64;
    for _ in 0..count {
        let c = OneParticleOperator::random_symmetric(d, &mut rng);
        let plus = QuadraticOperatorSpec::delta_plus(c.clone(), ons.clone(), d)?;
        let minus = QuadraticOperatorSpec::delta(c.adjoint(), ons.clone(), d)?;
        for n in source_sectors(QuadraticKind::DeltaPlus, basis.n_max()) {
            let up = assemble_sector_matrix(&plus, basis, n)?;
            let down = assemble_sector_matrix(&minus, basis, n + 2)?;
            worst = worst.max(matrix_residual(&up, &down.adjoint()));
        }
    }
    Ok(CheckResult::new(
        "adjoint.delta_plus",
        worst,
        STRUCTURAL_TOL,
    ))
}

/// `Delta(A^T) = Delta(A)` and `Delta+(C^T) = Delta+(C)` for completed sums.
pub fn transpose_symmetry_checks(
    basis: &Arc<FockBasis>,
    count: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut out = Vec::new();
    for (kind, name) in [
        (QuadraticKind::Delta, "symmetry.delta_transpose"),
        (QuadraticKind::DeltaPlus, "symmetry.delta_plus_transpose"),
    ] {
        let mut rng = stream(seed, name);
        let ons = OrthonormalSystem::random(d, d, derive_seed(seed, &format!("{name}.ons")))?;
        let mut worst = 0.0f64;
        for _ in 0..count {
            let a = OneParticleOperator::random(d, &mut rng);
            let x = QuadraticOperatorSpec::new(kind, a.clone(), ons.clone(), d)?;
            let y = QuadraticOperatorSpec::new(kind, a.transpose(), ons.clone(), d)?;
            for n in source_sectors(kind, basis.n_max()) {
                let mx = assemble_sector_matrix(&x, basis, n)?;
                let my = assemble_sector_matrix(&y, basis, n)?;
                worst = worst.max(matrix_residual(&my, &mx));
            }
        }
        out.push(CheckResult::new(name, worst, STRUCTURAL_TOL));
    }
    Ok(out)
}

/// Completed operators built from two independent complete ONS agree.
pub fn ons_independence_checks(
    basis: &Arc<FockBasis>,
    count: usize,
    seed: u64,
) -> Result<Vec<CheckResult>> {
    let d = basis.d();
    let mut out = Vec::new();
    for kind in QuadraticKind::ALL {
        let name = format!("ons_independence.{}", kind.name());
        let mut rng = stream(seed, &name);
        let mut worst = 0.0f64;
        for i in 0..count {
            let first =
                OrthonormalSystem::random(d, d, derive_seed(seed, &format!("{name}.{i}.first")))?;
            let second =
                OrthonormalSystem::random(d, d, derive_seed(seed, &format!("{name}.{i}.second")))?;
            let coeff = match kind {
                QuadraticKind::Number => OneParticleOperator::identity(d),
                _ => OneParticleOperator::random(d, &mut rng),
            };
            let x = QuadraticOperatorSpec::new(kind, coeff.clone(), first, d)?;
            let y = QuadraticOperatorSpec::new(kind, coeff, second, d)?;
            for n in source_sectors(kind, basis.n_max()) {
                let mx = assemble_sector_matrix(&x, basis, n)?;
                let my = assemble_sector_matrix(&y, basis, n)?;
                worst = worst.max(matrix_residual(&my, &mx));
            }
        }
        out.push(CheckResult::new(name, worst, STRUCTURAL_TOL));
    }
    Ok(out)
}

/// Relative difference of the completed operators over two systems, applied
/// to one state.
pub fn ons_independence_on_states(
    kind: QuadraticKind,
    coeff: &OneParticleOperator,
    first: &OrthonormalSystem,
    second: &OrthonormalSystem,
    phi: &FockVector,
) -> Result<f64> {
    let x = apply_partial(
        &QuadraticOperatorSpec::full(kind, coeff.clone(), first.clone())?,
        phi,
    )?;
    let y = apply_partial(
        &QuadraticOperatorSpec::full(kind, coeff.clone(), second.clone())?,
        phi,
    )?;
    let scale = x.norm().max(y.norm());
    let diff = x.sub(&y)?.norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Conjugation round trip on one-particle data; exact.
pub fn conjugation_check(d: usize, seed: u64) -> CheckResult {
    let mut rng = stream(seed, "oneparticle.conjugation");
    let a = OneParticleOperator::random(d, &mut rng);
    let v = OneParticleVector::random(d, &mut rng);
    let ok = a.conjugate().conjugate() == a
        && v.conjugate().conjugate() == v
        && a.transpose().transpose() == a
        && a.adjoint().adjoint() == a;
    CheckResult::new("oneparticle.involutions", if ok { 0.0 } else { 1.0 }, 0.0)
}

/// Sector Pythagoras and linear scaling of the alpha-norm: exact bookkeeping.
pub fn sector_orthogonality_check(
    basis: &Arc<FockBasis>,
    samples: usize,
    seed: u64,
    tol: f64,
) -> CheckResult {
    let mut rng = stream(seed, "sector_orthogonality");
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let phi = super::random_state(basis, basis.n_max(), &mut rng).scaled(C64::new(2.5, -1.0));
        let total: f64 = phi.sector_norms_sqr().iter().sum();
        worst = worst.max(rel(total, phi.norm_sqr()));
    }
    CheckResult::new("fock.sector_pythagoras", worst, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_basis, FockBasis, LadderWeight};

    #[test]
    fn ccr_passes_and_detects_tampering() {
        let b = build_basis(3, 4).unwrap();
        for c in ccr_checks(&b, 20, 1, 1e-11).unwrap() {
            assert!(c.passed, "{c:?}");
        }
        let bad = FockBasis::with_ladder_weight(3, 4, LadderWeight(f64::from)).unwrap();
        let checks = ccr_checks(&bad, 20, 1, 1e-11).unwrap();
        let canonical = checks
            .iter()
            .find(|c| c.name == "ccr.canonical_commutator")
            .unwrap();
        assert!(!canonical.passed);
    }

    #[test]
    fn structural_checks_pass() {
        let b = build_basis(3, 4).unwrap();
        let mut all = Vec::new();
        all.extend(half_power_checks(&b, 10, 2, 1e-10).unwrap());
        all.extend(ladder_norm_checks(&b, 5, 2).unwrap());
        all.push(permanent_formula_check(&b, 10, 2, 1e-11).unwrap());
        all.extend(alpha_norm_checks(&b, 10, 2, 1e-11).unwrap());
        all.extend(commutator_checks(&b, 10, 2).unwrap());
        all.extend(cross_path_checks(&b, 8, 2, 1e-11).unwrap());
        all.push(adjoint_dgamma_check(&b, 3, 2).unwrap());
        all.push(adjoint_delta_plus_check(&b, 3, 2).unwrap());
        all.extend(transpose_symmetry_checks(&b, 3, 2).unwrap());
        all.extend(ons_independence_checks(&b, 3, 2).unwrap());
        all.push(conjugation_check(3, 2));
        all.push(sector_orthogonality_check(&b, 5, 2, 1e-13));
        for c in &all {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn partial_sums_depend_on_the_system() {
        // The identities above are properties of the completed sums only.
        let b = build_basis(3, 3).unwrap();
        let mut rng = stream(9, "t");
        let first = OrthonormalSystem::random(3, 3, 1).unwrap();
        let second = OrthonormalSystem::random(3, 3, 2).unwrap();
        let coeff = OneParticleOperator::random(3, &mut rng);
        let phi = super::super::random_state(&b, 3, &mut rng);
        let full = ons_independence_on_states(QuadraticKind::DGamma, &coeff, &first, &second, &phi)
            .unwrap();
        assert!(full < 1e-12);
        let x = QuadraticOperatorSpec::dgamma(coeff.clone(), first, 1).unwrap();
        let y = QuadraticOperatorSpec::dgamma(coeff, second, 1).unwrap();
        let diff = apply_partial(&x, &phi)
            .unwrap()
            .sub(&apply_partial(&y, &phi).unwrap())
            .unwrap();
        assert!(diff.norm() > 1e-3);
    }
}
