//! Truncated symmetric Fock space over `C^d`.
//!
//! Basis states are occupation vectors `(n_1, ..., n_d)` with total particle
//! number at most `n_max`, ranked in graded colexicographic order: sectors
//! ascending, and inside a sector the vectors are compared from the last mode
//! backwards. Rank 0 is the vacuum.
//!
//! Creation-type operations never project silently. A state with support on
//! a sector too close to `n_max` is rejected with
//! [`Error::TruncationOverflow`].

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::oneparticle::OneParticleVector;
use crate::rng::complex_gaussian;

/// Upper bound on the number of basis states.
pub const MAX_BASIS_DIM: usize = 10_000_000;

const NONE: usize = usize::MAX;
const ZERO: C64 = C64::new(0.0, 0.0);

/// Matrix element of a single-mode ladder step between occupations `k - 1`
/// and `k`. The bosonic rule is `sqrt(k)`; other weights exist only to
/// mutation-test the verifier.
#[derive(Clone, Copy)]
pub struct LadderWeight(pub fn(u32) -> f64);

impl LadderWeight {
    pub const BOSONIC: LadderWeight = LadderWeight(bosonic_weight);
}

fn bosonic_weight(k: u32) -> f64 {
    f64::from(k).sqrt()
}

impl std::fmt::Debug for LadderWeight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("LadderWeight(..)")
    }
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Number of occupation vectors with total `n` over `d` modes.
pub fn sector_dimension(d: usize, n: usize) -> Option<usize> {
    binomial(n + d - 1, d - 1)
}

#[derive(Debug)]
pub struct FockBasis {
    d: usize,
    n_max: usize,
    /// Flat `dim x d` occupation table.
    occupations: Vec<u16>,
    sector_offsets: Vec<usize>,
    index: HashMap<Box<[u16]>, usize>,
    raise: Vec<usize>,
    lower: Vec<usize>,
    weight: LadderWeight,
}

/// Builds the truncated basis with the bosonic ladder rule.
pub fn build_basis(d: usize, n_max: usize) -> Result<Arc<FockBasis>> {
    FockBasis::new(d, n_max)
}

fn push_colex(d: usize, n: usize, out: &mut Vec<u16>, scratch: &mut Vec<u16>) {
    // Colex order: the last mode is the most significant key.
    fn rec(mode: usize, remaining: usize, out: &mut Vec<u16>, scratch: &mut Vec<u16>) {
        if mode == 0 {
            scratch[0] = remaining as u16;
            out.extend_from_slice(scratch);
            return;
        }
        for k in 0..=remaining {
            scratch[mode] = k as u16;
            rec(mode - 1, remaining - k, out, scratch);
        }
    }
    rec(d - 1, n, out, scratch);
}

impl FockBasis {
    pub fn new(d: usize, n_max: usize) -> Result<Arc<Self>> {
        Self::with_ladder_weight(d, n_max, LadderWeight::BOSONIC)
    }

    pub fn with_ladder_weight(d: usize, n_max: usize, weight: LadderWeight) -> Result<Arc<Self>> {
        if d == 0 {
            return Err(Error::EmptyDimension);
        }
        if n_max > u16::MAX as usize {
            return Err(Error::BasisTooLarge {
                dim: usize::MAX,
                max: MAX_BASIS_DIM,
            });
        }
        let mut sector_offsets = Vec::with_capacity(n_max + 2);
        let mut dim: usize = 0;
        sector_offsets.push(0);
        for n in 0..=n_max {
            let sd = sector_dimension(d, n).ok_or(Error::BasisTooLarge {
                dim: usize::MAX,
                max: MAX_BASIS_DIM,
            })?;
            dim = dim.saturating_add(sd);
            if dim > MAX_BASIS_DIM {
                return Err(Error::BasisTooLarge {
                    dim,
                    max: MAX_BASIS_DIM,
                });
            }
            sector_offsets.push(dim);
        }

        let mut occupations = Vec::with_capacity(dim * d);
        let mut scratch = vec![0u16; d];
        for n in 0..=n_max {
            push_colex(d, n, &mut occupations, &mut scratch);
        }
        debug_assert_eq!(occupations.len(), dim * d);

        let index: HashMap<Box<[u16]>, usize> = occupations
            .chunks_exact(d)
            .enumerate()
            .map(|(i, occ)| (occ.into(), i))
            .collect();

        let mut raise = vec![NONE; dim * d];
        let mut lower = vec![NONE; dim * d];
        let mut occ = vec![0u16; d];
        for i in 0..dim {
            occ.copy_from_slice(&occupations[i * d..(i + 1) * d]);
            for j in 0..d {
                occ[j] += 1;
                if let Some(&k) = index.get(occ.as_slice()) {
                    raise[i * d + j] = k;
                    lower[k * d + j] = i;
                }
                occ[j] -= 1;
            }
        }

        Ok(Arc::new(Self {
            d,
            n_max,
            occupations,
            sector_offsets,
            index,
            raise,
            lower,
            weight,
        }))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.sector_offsets[self.n_max + 1]
    }

    pub fn occupation(&self, rank: usize) -> &[u16] {
        &self.occupations[rank * self.d..(rank + 1) * self.d]
    }

    pub fn index_of(&self, occupation: &[u16]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn sector_range(&self, n: usize) -> Range<usize> {
        self.sector_offsets[n]..self.sector_offsets[n + 1]
    }

    pub fn sector_dim(&self, n: usize) -> usize {
        self.sector_range(n).len()
    }

    pub fn sector_offsets(&self) -> &[usize] {
        &self.sector_offsets
    }

    pub fn sector_of(&self, rank: usize) -> usize {
        // offsets are sorted; first offset strictly greater than rank, minus one
        self.sector_offsets.partition_point(|&o| o <= rank) - 1
    }

    fn check_sector(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::SectorOutOfRange {
                sector: n,
                n_max: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    fn check_dim(&self, f: &OneParticleVector) -> Result<()> {
        if f.dim() != self.d {
            Err(Error::DimensionMismatch {
                expected: self.d,
                found: f.dim(),
            })
        } else {
            Ok(())
        }
    }

    fn same(a: &Arc<FockBasis>, b: &Arc<FockBasis>) -> bool {
        Arc::ptr_eq(a, b)
    }
}

/// A state in the truncated Fock space, stored as one dense coefficient
/// vector whose sector blocks are contiguous.
#[derive(Debug, Clone)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    coeffs: Vec<C64>,
}

impl PartialEq for FockVector {
    fn eq(&self, other: &Self) -> bool {
        FockBasis::same(&self.basis, &other.basis) && self.coeffs == other.coeffs
    }
}

impl FockVector {
    pub fn zero(basis: &Arc<FockBasis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            coeffs: vec![ZERO; basis.dim()],
        }
    }

    /// The vacuum `Omega`.
    pub fn vacuum(basis: &Arc<FockBasis>) -> Self {
        let mut v = Self::zero(basis);
        v.coeffs[0] = C64::new(1.0, 0.0);
        v
    }

    pub fn basis_state(basis: &Arc<FockBasis>, occupation: &[u16]) -> Result<Self> {
        let rank = basis.index_of(occupation).ok_or(Error::UnknownOccupation)?;
        Ok(Self::unit(basis, rank))
    }

    pub fn unit(basis: &Arc<FockBasis>, rank: usize) -> Self {
        let mut v = Self::zero(basis);
        v.coeffs[rank] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_coefficients(basis: &Arc<FockBasis>, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: coeffs.len(),
            });
        }
        if !coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            basis: Arc::clone(basis),
            coeffs,
        })
    }

    /// A vector embedded from a sector block.
    pub fn from_sector(basis: &Arc<FockBasis>, n: usize, block: &[C64]) -> Result<Self> {
        basis.check_sector(n)?;
        let range = basis.sector_range(n);
        if block.len() != range.len() {
            return Err(Error::DimensionMismatch {
                expected: range.len(),
                found: block.len(),
            });
        }
        let mut v = Self::zero(basis);
        v.coeffs[range].copy_from_slice(block);
        Ok(v)
    }

    /// Normalized random state: i.i.d. complex Gaussian coefficients on each
    /// sector listed in `sectors`, zero elsewhere.
    pub fn random<R: Rng + ?Sized>(
        basis: &Arc<FockBasis>,
        sectors: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        let mut v = Self::zero(basis);
        for &n in sectors {
            basis.check_sector(n)?;
            for c in &mut v.coeffs[basis.sector_range(n)] {
                *c = complex_gaussian(rng);
            }
        }
        let norm = v.norm();
        if norm > 0.0 {
            v = v.scaled(C64::new(1.0 / norm, 0.0));
        }
        Ok(v)
    }

    /// Normalized random state supported on sectors `0..=max_sector`.
    pub fn random_up_to<R: Rng + ?Sized>(
        basis: &Arc<FockBasis>,
        max_sector: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let sectors: Vec<usize> = (0..=max_sector).collect();
        Self::random(basis, &sectors, rng)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coefficient(&self, occupation: &[u16]) -> Option<C64> {
        self.basis.index_of(occupation).map(|i| self.coeffs[i])
    }

    /// Block `Phi^(n)`.
    pub fn sector(&self, n: usize) -> &[C64] {
        &self.coeffs[self.basis.sector_range(n)]
    }

    pub fn sector_norm_sqr(&self, n: usize) -> f64 {
        self.sector(n).iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn sector_norms_sqr(&self) -> Vec<f64> {
        (0..=self.basis.n_max)
            .map(|n| self.sector_norm_sqr(n))
            .collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest sector carrying a nonzero coefficient; `None` for the zero vector.
    pub fn top_sector(&self) -> Option<usize> {
        (0..=self.basis.n_max)
            .rev()
            .find(|&n| self.sector(n).iter().any(|z| *z != ZERO))
    }

    /// Fails unless every sector above `n_max - headroom` is empty.
    pub fn require_headroom(&self, headroom: usize) -> Result<()> {
        match self.top_sector() {
            Some(top) if top + headroom > self.basis.n_max => Err(Error::TruncationOverflow {
                top_sector: top,
                n_max: self.basis.n_max,
                headroom,
            }),
            _ => Ok(()),
        }
    }

    fn check_basis(&self, other: &Self) -> Result<()> {
        if FockBasis::same(&self.basis, &other.basis) {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    /// `(self, other)`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_basis(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|z| z * c).collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Self) -> Result<()> {
        self.check_basis(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    fn map_sectors(&self, weight: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for n in 0..=self.basis.n_max {
            let w = weight(n);
            for c in &mut out.coeffs[self.basis.sector_range(n)] {
                *c *= w;
            }
        }
        out
    }

    /// `sqrt(sum_n w(n) ||Phi^(n)||^2)`.
    pub fn sector_weighted_norm(&self, weight: impl Fn(usize) -> f64) -> f64 {
        (0..=self.basis.n_max)
            .map(|n| weight(n) * self.sector_norm_sqr(n))
            .sum::<f64>()
            .sqrt()
    }
}

/// Creation operator `a+(f) = sum_j f_j a+_j`, linear in `f`.
pub fn apply_create(f: &OneParticleVector, phi: &FockVector) -> Result<FockVector> {
    let basis = &phi.basis;
    basis.check_dim(f)?;
    phi.require_headroom(1)?;
    let d = basis.d;
    let w = basis.weight.0;
    let mut out = FockVector::zero(basis);
    let fs = f.entries();
    for (i, &c) in phi.coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let occ = basis.occupation(i);
        for j in 0..d {
            if fs[j] == ZERO {
                continue;
            }
            let k = basis.raise[i * d + j];
            debug_assert_ne!(k, NONE);
            out.coeffs[k] += fs[j] * c * w(u32::from(occ[j]) + 1);
        }
    }
    Ok(out)
}

/// Annihilation operator `a(f) = sum_j f_j a_j`, linear in `f`.
pub fn apply_annihilate(f: &OneParticleVector, phi: &FockVector) -> Result<FockVector> {
    let basis = &phi.basis;
    basis.check_dim(f)?;
    let d = basis.d;
    let w = basis.weight.0;
    let mut out = FockVector::zero(basis);
    let fs = f.entries();
    for (i, &c) in phi.coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let occ = basis.occupation(i);
        for j in 0..d {
            if occ[j] == 0 || fs[j] == ZERO {
                continue;
            }
            let k = basis.lower[i * d + j];
            out.coeffs[k] += fs[j] * c * w(u32::from(occ[j]));
        }
    }
    Ok(out)
}

/// `a+(f_n) ... a+(f_1) Omega`; `fs[0]` acts first.
pub fn build_cyclic_vector(fs: &[OneParticleVector], basis: &Arc<FockBasis>) -> Result<FockVector> {
    if fs.len() > basis.n_max {
        return Err(Error::TruncationOverflow {
            top_sector: 0,
            n_max: basis.n_max,
            headroom: fs.len(),
        });
    }
    fs.iter()
        .try_fold(FockVector::vacuum(basis), |acc, f| apply_create(f, &acc))
}

/// `||Phi||_alpha = sqrt(sum_n (n+1)^(2 alpha) ||Phi^(n)||^2)`.
pub fn alpha_norm(phi: &FockVector, alpha: f64) -> f64 {
    phi.sector_weighted_norm(|n| ((n + 1) as f64).powf(2.0 * alpha))
}

/// `(N + shift)^alpha Phi`, by scaling sector `n` with `(n + shift)^alpha`.
pub fn apply_number_power(phi: &FockVector, alpha: f64, shift: f64) -> FockVector {
    phi.map_sectors(|n| (n as f64 + shift).powf(alpha))
}

/// Which ladder operator to restrict to a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Matrix of `op` restricted from sector `n_from` to sector `n_to`, built
/// by applying `op` to each basis vector of the source sector. Rows and
/// columns follow basis order.
pub fn sector_matrix<F>(
    basis: &Arc<FockBasis>,
    n_from: usize,
    n_to: usize,
    mut op: F,
) -> Result<DMatrix<C64>>
where
    F: FnMut(&FockVector) -> Result<FockVector>,
{
    basis.check_sector(n_from)?;
    basis.check_sector(n_to)?;
    let cols = basis.sector_range(n_from);
    let rows = basis.sector_range(n_to);
    let mut m = DMatrix::zeros(rows.len(), cols.len());
    for (c, rank) in cols.enumerate() {
        let image = op(&FockVector::unit(basis, rank))?;
        for (r, z) in image.sector(n_to).iter().enumerate() {
            m[(r, c)] = *z;
        }
    }
    Ok(m)
}

/// `a(f)` restricted `n -> n-1` or `a+(f)` restricted `n -> n+1`.
pub fn ladder_sector_matrix(
    basis: &Arc<FockBasis>,
    f: &OneParticleVector,
    ladder: Ladder,
    n_from: usize,
) -> Result<DMatrix<C64>> {
    match ladder {
        Ladder::Create => sector_matrix(basis, n_from, n_from + 1, |v| apply_create(f, v)),
        Ladder::Annihilate => {
            if n_from == 0 {
                return Ok(DMatrix::zeros(0, 1));
            }
            sector_matrix(basis, n_from, n_from - 1, |v| apply_annihilate(f, v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oneparticle::{inner_product, Conjugate};
    use crate::rng::rng_from_seed;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn e(d: usize, j: usize) -> OneParticleVector {
        OneParticleVector::basis(d, j)
    }

    #[test]
    fn basis_small_order() {
        let b = build_basis(2, 2).unwrap();
        assert_eq!(b.dim(), 6);
        let order: Vec<Vec<u16>> = (0..6).map(|i| b.occupation(i).to_vec()).collect();
        assert_eq!(
            order,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert_eq!(b.sector_offsets(), &[0, 1, 3, 6]);
    }

    #[test]
    fn basis_dimensions() {
        assert_eq!(build_basis(1, 5).unwrap().dim(), 6);
        // 1 + 6 + 21 + 56 + 126
        assert_eq!(build_basis(6, 4).unwrap().dim(), 210);
        assert_eq!(build_basis(3, 0).unwrap().dim(), 1);
        assert!(matches!(
            build_basis(40, 12),
            Err(Error::BasisTooLarge { .. })
        ));
        assert_eq!(build_basis(0, 2).unwrap_err(), Error::EmptyDimension);
    }

    #[test]
    fn index_round_trip_and_sector_of() {
        let b = build_basis(4, 3).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.occupation(i)), Some(i));
            let n: usize = b.occupation(i).iter().map(|&x| x as usize).sum();
            assert_eq!(b.sector_of(i), n);
        }
        assert_eq!(b.occupation(0), &[0, 0, 0, 0]);
    }

    #[test]
    fn create_examples() {
        let b = build_basis(2, 3).unwrap();
        let omega = FockVector::vacuum(&b);
        let one = apply_create(&e(2, 0), &omega).unwrap();
        assert_eq!(one, FockVector::basis_state(&b, &[1, 0]).unwrap());
        let two = apply_create(&e(2, 0), &one).unwrap();
        assert_eq!(two.coefficient(&[2, 0]).unwrap(), c(2f64.sqrt()));
        assert_eq!(two.norm(), 2f64.sqrt());
    }

    #[test]
    fn create_overflow_is_an_error() {
        let b = build_basis(2, 2).unwrap();
        let top = FockVector::basis_state(&b, &[1, 1]).unwrap();
        assert_eq!(
            apply_create(&e(2, 0), &top),
            Err(Error::TruncationOverflow {
                top_sector: 2,
                n_max: 2,
                headroom: 1
            })
        );
    }

    #[test]
    fn annihilate_examples() {
        let b = build_basis(2, 3).unwrap();
        let mut rng = rng_from_seed(1);
        let f = OneParticleVector::random(2, &mut rng);
        let omega = FockVector::vacuum(&b);
        let out = apply_annihilate(&f, &omega).unwrap();
        assert_eq!(out.norm(), 0.0);
        let two = FockVector::basis_state(&b, &[2, 0]).unwrap();
        let out = apply_annihilate(&e(2, 0), &two).unwrap();
        assert_eq!(out.coefficient(&[1, 0]).unwrap(), c(2f64.sqrt()));
        assert_eq!(out.norm(), 2f64.sqrt());
    }

    #[test]
    fn annihilate_is_linear_in_f() {
        let b = build_basis(3, 3).unwrap();
        let mut rng = rng_from_seed(8);
        let phi = FockVector::random_up_to(&b, 3, &mut rng).unwrap();
        let i = C64::new(0.0, 1.0);
        let f = OneParticleVector::random(3, &mut rng);
        let lhs = apply_annihilate(&f.scaled(i), &phi).unwrap();
        let rhs = apply_annihilate(&f, &phi).unwrap().scaled(i);
        assert!(lhs.sub(&rhs).unwrap().norm() < 1e-14);
    }

    #[test]
    fn cyclic_vector_examples() {
        let b = build_basis(2, 3).unwrap();
        assert_eq!(
            build_cyclic_vector(&[], &b).unwrap(),
            FockVector::vacuum(&b)
        );
        let v = build_cyclic_vector(&[e(2, 0), e(2, 1)], &b).unwrap();
        assert_eq!(v, FockVector::basis_state(&b, &[1, 1]).unwrap());
        assert!(matches!(
            build_cyclic_vector(&[e(2, 0), e(2, 0), e(2, 0), e(2, 0)], &b),
            Err(Error::TruncationOverflow { .. })
        ));
    }

    #[test]
    fn alpha_norm_examples() {
        let b = build_basis(2, 3).unwrap();
        let omega = FockVector::vacuum(&b);
        assert_eq!(alpha_norm(&omega, 0.7), 1.0);
        let phi = omega
            .add(&FockVector::basis_state(&b, &[1, 0]).unwrap())
            .unwrap();
        assert!((alpha_norm(&phi, 1.0) - 5f64.sqrt()).abs() < 1e-15);
        let mut rng = rng_from_seed(4);
        let r = FockVector::random_up_to(&b, 3, &mut rng)
            .unwrap()
            .scaled(c(3.5));
        assert_eq!(alpha_norm(&r, 0.0), r.norm());
    }

    #[test]
    fn alpha_norm_equals_shifted_number_power() {
        let b = build_basis(3, 4).unwrap();
        let mut rng = rng_from_seed(12);
        let phi = FockVector::random_up_to(&b, 4, &mut rng).unwrap();
        for alpha in [0.0, 0.5, 1.0, 1.5, 2.3] {
            let direct = alpha_norm(&phi, alpha);
            let via = apply_number_power(&phi, alpha, 1.0).norm();
            assert!((direct - via).abs() <= 1e-13 * direct);
        }
    }

    #[test]
    fn number_power_examples() {
        let b = build_basis(2, 4).unwrap();
        let mut rng = rng_from_seed(2);
        let phi = FockVector::random(&b, &[3], &mut rng).unwrap();
        let n_phi = apply_number_power(&phi, 1.0, 0.0);
        assert!(n_phi.sub(&phi.scaled(c(3.0))).unwrap().norm() < 1e-15);
        let omega = FockVector::vacuum(&b);
        let half = apply_number_power(&omega, 0.5, 2.0);
        assert_eq!(half.coefficients()[0], c(2f64.sqrt()));
        assert_eq!(apply_number_power(&phi, 0.0, 0.0), phi);
    }

    #[test]
    fn sector_pythagoras() {
        let b = build_basis(4, 4).unwrap();
        let mut rng = rng_from_seed(19);
        let phi = FockVector::random_up_to(&b, 4, &mut rng)
            .unwrap()
            .scaled(c(2.5));
        let total: f64 = phi.sector_norms_sqr().iter().sum();
        assert!((total - phi.norm_sqr()).abs() <= 1e-13 * phi.norm_sqr());
        assert_eq!(phi.top_sector(), Some(4));
        assert_eq!(FockVector::zero(&b).top_sector(), None);
    }

    #[test]
    fn adjoint_relation() {
        let b = build_basis(3, 4).unwrap();
        let mut rng = rng_from_seed(21);
        for _ in 0..10 {
            let f = OneParticleVector::random(3, &mut rng);
            let phi = FockVector::random_up_to(&b, 4, &mut rng).unwrap();
            let psi = FockVector::random_up_to(&b, 3, &mut rng).unwrap();
            let lhs = apply_annihilate(&f, &phi).unwrap().inner(&psi).unwrap();
            let rhs = phi
                .inner(&apply_create(&f.conjugate(), &psi).unwrap())
                .unwrap();
            assert!((lhs - rhs).norm() <= 1e-11 * f.norm());
        }
    }

    #[test]
    fn sector_ladder_norms() {
        let b = build_basis(3, 4).unwrap();
        let mut rng = rng_from_seed(31);
        let f = OneParticleVector::random(3, &mut rng);
        for n in 1..=3 {
            let m = ladder_sector_matrix(&b, &f, Ladder::Annihilate, n).unwrap();
            let top = m.svd(false, false).singular_values.max();
            assert!((top - (n as f64).sqrt() * f.norm()).abs() < 1e-10);
            let m = ladder_sector_matrix(&b, &f, Ladder::Create, n).unwrap();
            let top = m.svd(false, false).singular_values.max();
            assert!((top - ((n + 1) as f64).sqrt() * f.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn create_norm_attained_on_coherent_power() {
        let b = build_basis(3, 4).unwrap();
        let mut rng = rng_from_seed(41);
        let f = OneParticleVector::random(3, &mut rng);
        let n = 2;
        let fs = vec![f.clone(); n];
        let v = build_cyclic_vector(&fs, &b).unwrap();
        let v = v.scaled(c(1.0 / v.norm()));
        let out = apply_create(&f, &v).unwrap().norm();
        assert!((out - ((n + 1) as f64).sqrt() * f.norm()).abs() < 1e-12);
    }

    #[test]
    fn scalar_product_two_particles() {
        // (a+(f2)a+(f1)Omega, a+(g2)a+(g1)Omega) = (f1,g1)(f2,g2) + (f1,g2)(f2,g1)
        let b = build_basis(3, 2).unwrap();
        let mut rng = rng_from_seed(5);
        let f: Vec<_> = (0..2)
            .map(|_| OneParticleVector::random(3, &mut rng))
            .collect();
        let g: Vec<_> = (0..2)
            .map(|_| OneParticleVector::random(3, &mut rng))
            .collect();
        let lhs = build_cyclic_vector(&f, &b)
            .unwrap()
            .inner(&build_cyclic_vector(&g, &b).unwrap())
            .unwrap();
        let ip = |x: &OneParticleVector, y: &OneParticleVector| inner_product(x, y).unwrap();
        let rhs = ip(&f[0], &g[0]) * ip(&f[1], &g[1]) + ip(&f[0], &g[1]) * ip(&f[1], &g[0]);
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let a = build_basis(2, 2).unwrap();
        let b = build_basis(2, 2).unwrap();
        assert_eq!(
            FockVector::vacuum(&a).inner(&FockVector::vacuum(&b)),
            Err(Error::BasisMismatch)
        );
    }
}
