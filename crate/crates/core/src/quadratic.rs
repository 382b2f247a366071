//! Quadratic operators as partial sums over an orthonormal system:
//!
//! ```text
//! N_M        = sum_{j<=M} a+(e_j)   a(conj e_j)
//! dGamma_M(B) = sum_{j<=M} a+(B e_j) a(conj e_j)
//! Delta_M(A)  = sum_{j<=M} a(A e_j)  a(conj e_j)
//! Delta+_M(C) = sum_{j<=M} a+(C e_j) a+(conj e_j)
//! ```
//!
//! Each summand is evaluated right factor first with the ladder operations
//! of [`crate::fock`]. The completed operators are the `M = d` sums over a
//! complete system. The cyclic-vector oracles and closed forms at the end of
//! this module compute the same quantities along independent paths.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    apply_annihilate, apply_create, build_cyclic_vector, sector_matrix, FockBasis, FockVector,
    Ladder,
};
use crate::oneparticle::{
    bilinear_pairing, inner_product, Conjugate, OneParticleOperator, OneParticleVector,
    OrthonormalSystem,
};

/// Tolerance on `A^T = A` for [`omega_formula`], relative to the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadraticKind {
    Number,
    #[serde(rename = "dgamma")]
    DGamma,
    Delta,
    DeltaPlus,
}

impl QuadraticKind {
    pub const ALL: [QuadraticKind; 4] = [
        QuadraticKind::Number,
        QuadraticKind::DGamma,
        QuadraticKind::Delta,
        QuadraticKind::DeltaPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuadraticKind::Number => "number",
            QuadraticKind::DGamma => "dgamma",
            QuadraticKind::Delta => "delta",
            QuadraticKind::DeltaPlus => "delta-plus",
        }
    }

    /// Change of particle number.
    pub fn sector_shift(self) -> isize {
        match self {
            QuadraticKind::Number | QuadraticKind::DGamma => 0,
            QuadraticKind::Delta => -2,
            QuadraticKind::DeltaPlus => 2,
        }
    }

    /// Free sectors a state needs below `n_max`.
    pub fn headroom(self) -> usize {
        match self {
            QuadraticKind::DeltaPlus => 2,
            _ => 0,
        }
    }

    fn factors(self) -> (Ladder, Ladder) {
        match self {
            QuadraticKind::Number | QuadraticKind::DGamma => (Ladder::Create, Ladder::Annihilate),
            QuadraticKind::Delta => (Ladder::Annihilate, Ladder::Annihilate),
            QuadraticKind::DeltaPlus => (Ladder::Create, Ladder::Create),
        }
    }
}

impl std::fmt::Display for QuadraticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One partial sum: family, coefficient operator, orthonormal system and
/// truncation index `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticOperatorSpec {
    kind: QuadraticKind,
    coeff: OneParticleOperator,
    ons: OrthonormalSystem,
    m: usize,
}

/// `outer(x) inner(y)`; the inner factor acts first.
struct Summand {
    outer: (Ladder, OneParticleVector),
    inner: (Ladder, OneParticleVector),
}

fn apply_ladder(ladder: Ladder, f: &OneParticleVector, phi: &FockVector) -> Result<FockVector> {
    match ladder {
        Ladder::Create => apply_create(f, phi),
        Ladder::Annihilate => apply_annihilate(f, phi),
    }
}

fn dual(ladder: Ladder) -> Ladder {
    match ladder {
        Ladder::Create => Ladder::Annihilate,
        Ladder::Annihilate => Ladder::Create,
    }
}

impl QuadraticOperatorSpec {
    pub fn new(
        kind: QuadraticKind,
        coeff: OneParticleOperator,
        ons: OrthonormalSystem,
        m: usize,
    ) -> Result<Self> {
        if coeff.dim() != ons.dim() {
            return Err(Error::DimensionMismatch {
                expected: ons.dim(),
                found: coeff.dim(),
            });
        }
        if m > ons.len() {
            return Err(Error::IndexOutOfRange { m, len: ons.len() });
        }
        Ok(Self {
            kind,
            coeff,
            ons,
            m,
        })
    }

    /// The `M = len(ons)` sum.
    pub fn full(
        kind: QuadraticKind,
        coeff: OneParticleOperator,
        ons: OrthonormalSystem,
    ) -> Result<Self> {
        let m = ons.len();
        Self::new(kind, coeff, ons, m)
    }

    pub fn number(ons: OrthonormalSystem, m: usize) -> Result<Self> {
        let d = ons.dim();
        Self::new(
            QuadraticKind::Number,
            OneParticleOperator::identity(d),
            ons,
            m,
        )
    }

    pub fn dgamma(b: OneParticleOperator, ons: OrthonormalSystem, m: usize) -> Result<Self> {
        Self::new(QuadraticKind::DGamma, b, ons, m)
    }

    pub fn delta(a: OneParticleOperator, ons: OrthonormalSystem, m: usize) -> Result<Self> {
        Self::new(QuadraticKind::Delta, a, ons, m)
    }

    pub fn delta_plus(c: OneParticleOperator, ons: OrthonormalSystem, m: usize) -> Result<Self> {
        Self::new(QuadraticKind::DeltaPlus, c, ons, m)
    }

    pub fn with_m(&self, m: usize) -> Result<Self> {
        Self::new(self.kind, self.coeff.clone(), self.ons.clone(), m)
    }

    pub fn kind(&self) -> QuadraticKind {
        self.kind
    }

    pub fn coeff(&self) -> &OneParticleOperator {
        &self.coeff
    }

    pub fn ons(&self) -> &OrthonormalSystem {
        &self.ons
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn image_sector(&self, n_from: usize) -> Option<usize> {
        n_from.checked_add_signed(self.kind.sector_shift())
    }

    fn summands(&self) -> Result<Vec<Summand>> {
        let (outer, inner) = self.kind.factors();
        self.ons.columns()[..self.m]
            .iter()
            .map(|e| {
                Ok(Summand {
                    outer: (outer, self.coeff.apply(e)?),
                    inner: (inner, e.conjugate()),
                })
            })
            .collect()
    }

    fn check_basis(&self, basis: &FockBasis) -> Result<()> {
        if basis.d() != self.ons.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ons.dim(),
                found: basis.d(),
            });
        }
        Ok(())
    }
}

/// Applies the partial sum to `phi`.
pub fn apply_partial(spec: &QuadraticOperatorSpec, phi: &FockVector) -> Result<FockVector> {
    spec.check_basis(phi.basis())?;
    phi.require_headroom(spec.kind.headroom())?;
    let mut out = FockVector::zero(phi.basis());
    for s in spec.summands()? {
        let mid = apply_ladder(s.inner.0, &s.inner.1, phi)?;
        let term = apply_ladder(s.outer.0, &s.outer.1, &mid)?;
        out.axpy(C64::new(1.0, 0.0), &term)?;
    }
    Ok(out)
}

/// Applies the Fock-space adjoint of the partial sum, summand by summand:
/// `(X(x) Y(y))^* = Y(y)^* X(x)^*` with `a(f)^* = a+(conj f)`.
pub fn apply_partial_adjoint(spec: &QuadraticOperatorSpec, phi: &FockVector) -> Result<FockVector> {
    spec.check_basis(phi.basis())?;
    let headroom = match spec.kind {
        QuadraticKind::Delta => 2,
        _ => 0,
    };
    phi.require_headroom(headroom)?;
    let mut out = FockVector::zero(phi.basis());
    for s in spec.summands()? {
        let mid = apply_ladder(dual(s.outer.0), &s.outer.1.conjugate(), phi)?;
        let term = apply_ladder(dual(s.inner.0), &s.inner.1.conjugate(), &mid)?;
        out.axpy(C64::new(1.0, 0.0), &term)?;
    }
    Ok(out)
}

/// Matrix of the partial sum from sector `n_from` to its image sector, in
/// basis order. `Delta` from sectors 0 and 1 has no image sector and yields
/// an empty `0 x dim` matrix.
pub fn assemble_sector_matrix(
    spec: &QuadraticOperatorSpec,
    basis: &Arc<FockBasis>,
    n_from: usize,
) -> Result<DMatrix<C64>> {
    spec.check_basis(basis)?;
    let n_to = match spec.image_sector(n_from) {
        Some(n) => n,
        None => return Ok(DMatrix::zeros(0, basis.sector_dim(n_from))),
    };
    if n_to > basis.n_max() {
        return Err(Error::TruncationOverflow {
            top_sector: n_from,
            n_max: basis.n_max(),
            headroom: spec.kind.headroom(),
        });
    }
    sector_matrix(basis, n_from, n_to, |v| apply_partial(spec, v))
}

/// Sector matrix of the Fock adjoint, `image(n_from) -> n_from` reversed:
/// maps sector `n_from` to `n_from - shift`.
pub fn assemble_adjoint_sector_matrix(
    spec: &QuadraticOperatorSpec,
    basis: &Arc<FockBasis>,
    n_from: usize,
) -> Result<DMatrix<C64>> {
    spec.check_basis(basis)?;
    let n_to = match n_from.checked_add_signed(-spec.kind.sector_shift()) {
        Some(n) => n,
        None => return Ok(DMatrix::zeros(0, basis.sector_dim(n_from))),
    };
    if n_to > basis.n_max() {
        return Err(Error::TruncationOverflow {
            top_sector: n_from,
            n_max: basis.n_max(),
            headroom: 2,
        });
    }
    sector_matrix(basis, n_from, n_to, |v| apply_partial_adjoint(spec, v))
}

/// `sum_k a+(f_n) ... a+(B f_k) ... a+(f_1) Omega`, the action of the
/// completed `dGamma(B)` on a cyclic vector. Zero for empty `fs`.
pub fn dgamma_cyclic_oracle(
    b: &OneParticleOperator,
    fs: &[OneParticleVector],
    basis: &Arc<FockBasis>,
) -> Result<FockVector> {
    if fs.len() > basis.n_max() {
        return Err(Error::TruncationOverflow {
            top_sector: 0,
            n_max: basis.n_max(),
            headroom: fs.len(),
        });
    }
    let mut out = FockVector::zero(basis);
    for k in 0..fs.len() {
        let mut replaced = fs.to_vec();
        replaced[k] = b.apply(&fs[k])?;
        out.axpy(C64::new(1.0, 0.0), &build_cyclic_vector(&replaced, basis)?)?;
    }
    Ok(out)
}

/// `sum_{k != l} (conj g_l, A g_k) a+(g_n) ... [g_l, g_k omitted] ... Omega`,
/// the action of the completed `Delta(A)` on a cyclic vector.
pub fn delta_cyclic_oracle(
    a: &OneParticleOperator,
    gs: &[OneParticleVector],
    basis: &Arc<FockBasis>,
) -> Result<FockVector> {
    let mut out = FockVector::zero(basis);
    for k in 0..gs.len() {
        let agk = a.apply(&gs[k])?;
        for l in 0..gs.len() {
            if l == k {
                continue;
            }
            let coeff = bilinear_pairing(&gs[l], &agk)?;
            let rest: Vec<OneParticleVector> = gs
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k && *i != l)
                .map(|(_, g)| g.clone())
                .collect();
            out.axpy(coeff, &build_cyclic_vector(&rest, basis)?)?;
        }
    }
    Ok(out)
}

fn check_range(ons: &OrthonormalSystem, m1: usize, m2: usize) -> Result<()> {
    if m1 < 1 || m1 > m2 || m2 > ons.len() {
        return Err(Error::InvalidRange {
            from: m1,
            to: m2,
            len: ons.len(),
        });
    }
    Ok(())
}

/// Closed form of `|| sum_{j=m1}^{m2} a+(C e_j) a+(conj e_j) Omega ||^2`
/// (indices one-based and inclusive):
/// `sum_j ||C e_j||^2 + sum_{j,k} (conj e_j, C e_k)(C e_j, conj e_k)`.
pub fn vacuum_pair_norm_formula(
    c: &OneParticleOperator,
    ons: &OrthonormalSystem,
    m1: usize,
    m2: usize,
) -> Result<f64> {
    check_range(ons, m1, m2)?;
    let es = &ons.columns()[m1 - 1..m2];
    let ces: Vec<OneParticleVector> = es.iter().map(|e| c.apply(e)).collect::<Result<_>>()?;
    let conj_es: Vec<OneParticleVector> = es.iter().map(|e| e.conjugate()).collect();
    let mut total = C64::new(ces.iter().map(|v| v.norm().powi(2)).sum(), 0.0);
    for (j, ej) in es.iter().enumerate() {
        for (k, cek) in ces.iter().enumerate() {
            total += bilinear_pairing(ej, cek)? * inner_product(&ces[j], &conj_es[k])?;
        }
    }
    let residue = total.im.abs();
    if residue > 1e-12 * (1.0 + total.re.abs()) {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(total.re)
}

/// `omega_M = sum_{j,k<=M} |(A e_j, conj e_k)|^2 + sum_{k<=M} ||A e_k||^2`,
/// the vacuum eigenvalue of `Delta_M(A) Delta_M(A)^*` for symmetric `A`.
pub fn omega_formula(a: &OneParticleOperator, ons: &OrthonormalSystem, m: usize) -> Result<f64> {
    let scale = a.matrix().camax().max(1.0);
    let residual = a.symmetry_residual();
    if residual > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { residual });
    }
    if m > ons.len() {
        return Err(Error::IndexOutOfRange { m, len: ons.len() });
    }
    let es = &ons.columns()[..m];
    let aes: Vec<OneParticleVector> = es.iter().map(|e| a.apply(e)).collect::<Result<_>>()?;
    let mut total: f64 = aes.iter().map(|v| v.norm().powi(2)).sum();
    for aej in &aes {
        for ek in es {
            total += inner_product(aej, &ek.conjugate())?.norm_sqr();
        }
    }
    Ok(total)
}
