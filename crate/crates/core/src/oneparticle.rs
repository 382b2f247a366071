//! The one-particle space `L = C^d`.
//!
//! The conjugation `J` is fixed as entrywise complex conjugation in the
//! canonical basis. Conjugate, transpose and adjoint of operators all derive
//! from it: `conj(A) = J A J`, `A^T = conj(A)^*`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{complex_gaussians, rng_from_seed};

/// Orthonormality tolerance for [`OrthonormalSystem`].
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Size guard for [`permanent`].
pub const PERMANENT_MAX: usize = 12;

/// Entrywise complex conjugation, the fixed model of `J`.
pub trait Conjugate {
    fn conjugate(&self) -> Self;
}

fn all_finite<'a>(it: impl IntoIterator<Item = &'a C64>) -> bool {
    it.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleVector {
    entries: DVector<C64>,
}

impl OneParticleVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(entries))
    }

    pub fn from_dvector(entries: DVector<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if !all_finite(entries.iter()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Canonical basis vector `e_j` (zero-based `j`).
    pub fn basis(d: usize, j: usize) -> Self {
        assert!(j < d, "basis index {j} out of range for dimension {d}");
        let mut entries = DVector::zeros(d);
        entries[j] = C64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1);
        Self {
            entries: DVector::zeros(d),
        }
    }

    /// Standard complex Gaussian entries.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            entries: DVector::from_vec(complex_gaussians(rng, d)),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        self.entries.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        inner_product(self, other)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            entries: &self.entries * c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

impl Conjugate for OneParticleVector {
    fn conjugate(&self) -> Self {
        Self {
            entries: self.entries.map(|z| z.conj()),
        }
    }
}

/// Hermitian inner product, antilinear in the first argument.
pub fn inner_product(f: &OneParticleVector, g: &OneParticleVector) -> Result<C64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(f.entries.dotc(&g.entries))
}

/// Bilinear pairing `(conj(f), g) = sum_j f_j g_j`, the scalar in `[a(f), a+(g)]`.
pub fn bilinear_pairing(f: &OneParticleVector, g: &OneParticleVector) -> Result<C64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(f.entries.dot(&g.entries))
}

/// A bounded operator on `C^d`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParticleOperator {
    matrix: DMatrix<C64>,
}

impl OneParticleOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if !all_finite(matrix.iter()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(d: usize) -> Self {
        assert!(d >= 1);
        Self {
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1);
        Self {
            matrix: DMatrix::zeros(d, d),
        }
    }

    pub fn diagonal(entries: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn real_diagonal(entries: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&entries)
    }

    /// `u v^*`.
    pub fn rank_one(u: &OneParticleVector, v: &OneParticleVector) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                found: v.dim(),
            });
        }
        Self::new(u.as_dvector() * v.as_dvector().adjoint())
    }

    /// Complex Gaussian entries.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            matrix: DMatrix::from_vec(d, d, complex_gaussians(rng, d * d)),
        }
    }

    /// Random operator with `A^T = A`.
    pub fn random_symmetric<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let x = Self::random(d, rng);
        let sym = (&x.matrix + x.matrix.transpose()) * C64::new(0.5, 0.0);
        Self { matrix: sym }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `A^T := conj(A)^*`.
    pub fn transpose(&self) -> Self {
        self.conjugate().adjoint()
    }

    pub fn apply(&self, v: &OneParticleVector) -> Result<OneParticleVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        Ok(OneParticleVector {
            entries: &self.matrix * v.as_dvector(),
        })
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            matrix: &self.matrix * c,
        }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn hs_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `max |A - A^T|` entrywise.
    pub fn symmetry_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).camax()
    }

    /// `A P_M`, the restriction of `A` to the span of the first `m` vectors of `ons`.
    pub fn restricted_to(&self, ons: &OrthonormalSystem, m: usize) -> Result<Self> {
        Ok(Self {
            matrix: &self.matrix * ons.projector(m)?,
        })
    }
}

impl Conjugate for OneParticleOperator {
    fn conjugate(&self) -> Self {
        Self {
            matrix: self.matrix.map(|z| z.conj()),
        }
    }
}

/// Operator-level conjugation `conj(A) = J A J`; vector-level via [`Conjugate`].
pub fn conjugate_map<T: Conjugate>(x: &T) -> T {
    x.conjugate()
}

pub fn operator_norm(a: &OneParticleOperator) -> f64 {
    a.operator_norm()
}

pub fn hs_norm(a: &OneParticleOperator) -> f64 {
    a.hs_norm()
}

/// A finite orthonormal system `e_1, ..., e_M` in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalSystem {
    dim: usize,
    columns: Vec<OneParticleVector>,
}

impl OrthonormalSystem {
    pub fn new(columns: Vec<OneParticleVector>) -> Result<Self> {
        let dim = columns
            .first()
            .map(|c| c.dim())
            .ok_or(Error::EmptyDimension)?;
        if let Some(bad) = columns.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if columns.len() > dim {
            return Err(Error::TooManyVectors {
                m: columns.len(),
                d: dim,
            });
        }
        let ons = Self { dim, columns };
        let residual = ons.orthonormality_residual();
        if residual > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(ons)
    }

    pub fn canonical(d: usize) -> Self {
        Self {
            dim: d,
            columns: (0..d).map(|j| OneParticleVector::basis(d, j)).collect(),
        }
    }

    /// `m` orthonormal columns from the QR factorization of a seeded
    /// complex Gaussian `d x m` matrix.
    pub fn random(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyDimension);
        }
        if m > d {
            return Err(Error::TooManyVectors { m, d });
        }
        if m == 0 {
            return Ok(Self {
                dim: d,
                columns: Vec::new(),
            });
        }
        let mut rng = rng_from_seed(seed);
        let g = DMatrix::from_vec(d, m, complex_gaussians(&mut rng, d * m));
        let q = g.qr().q();
        let columns = (0..m)
            .map(|j| OneParticleVector {
                entries: q.column(j).into_owned(),
            })
            .collect();
        Self::new(columns)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.columns.len() == self.dim
    }

    pub fn columns(&self) -> &[OneParticleVector] {
        &self.columns
    }

    /// Zero-based access.
    pub fn get(&self, j: usize) -> &OneParticleVector {
        &self.columns[j]
    }

    /// `d x M` matrix with the vectors as columns.
    pub fn matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim, self.columns.len(), |i, j| {
            self.columns[j].entries[i]
        })
    }

    /// Orthogonal projector onto the span of the first `m` vectors.
    pub fn projector(&self, m: usize) -> Result<DMatrix<C64>> {
        if m > self.len() {
            return Err(Error::IndexOutOfRange { m, len: self.len() });
        }
        let mut p = DMatrix::zeros(self.dim, self.dim);
        for e in &self.columns[..m] {
            p += e.as_dvector() * e.as_dvector().adjoint();
        }
        Ok(p)
    }

    /// `max |(e_j, e_k) - delta_jk|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let e = self.matrix();
        let gram = e.adjoint() * &e;
        let n = gram.nrows();
        (gram - DMatrix::<C64>::identity(n, n)).camax()
    }
}

pub fn random_orthonormal_system(d: usize, m: usize, seed: u64) -> Result<OrthonormalSystem> {
    OrthonormalSystem::random(d, m, seed)
}

/// Permanent by Ryser's inclusion-exclusion formula with Gray-code updates,
/// `O(2^n n)`. Limited to `n <= PERMANENT_MAX`.
pub fn permanent(g: &DMatrix<C64>) -> Result<C64> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: g.ncols(),
        });
    }
    if n > PERMANENT_MAX {
        return Err(Error::PermanentTooLarge {
            n,
            max: PERMANENT_MAX,
        });
    }
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    // perm(G) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} g_ij
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut prev_gray: u32 = 0;
    for k in 1u32..(1u32 << n) {
        let gray = k ^ (k >> 1);
        let flipped = gray ^ prev_gray;
        let col = flipped.trailing_zeros() as usize;
        let added = gray & flipped != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += g[(i, col)];
            } else {
                *s -= g[(i, col)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if (n as u32 - gray.count_ones()).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
        prev_gray = gray;
    }
    Ok(total)
}
