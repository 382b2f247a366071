//! Operator inequalities between quadratic forms, checked on one particle
//! sector at a time. Both sides are assembled as sector matrices from
//! ladder-operator sector matrices; the Hermitized difference `RHS - LHS`
//! must have no eigenvalue below `-tol * scale`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{CheckResult, STRUCTURAL_TOL};
use crate::error::{Error, Result};
use crate::fock::{ladder_sector_matrix, FockBasis, Ladder};
use crate::oneparticle::{Conjugate, OneParticleOperator, OneParticleVector, OrthonormalSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

/// Which pair of operator families enters the Cauchy-Schwarz form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CauchySchwarzVariant {
    /// `a_j = a(conj A e_j)`, `b_k = a(conj B e_k)`.
    Annihilators,
    /// `a_j = a+(A e_j)`, `b_k = a(conj B e_k)`.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsdForm {
    /// `sign * sum_jk a_j* b_k* b_j a_k <= sum_jk a_j* b_k* b_k a_j`.
    CauchySchwarz {
        sign: Sign,
        variant: CauchySchwarzVariant,
    },
    /// `0 <= sum_{j<=M} a+(BA e_j) a(conj BA e_j)`.
    DiagonalizationLower,
    /// `sum_{j<=M} a+(BA e_j) a(conj BA e_j)
    ///  = sum_jk (A_M* e'_j, A_M* e'_k) a+(B e'_j) a(conj B e'_k)`
    /// with `A_M = A P_M` and `e'` the left singular vectors of `A_M`.
    DiagonalizationMiddle,
    /// `sum_{j<=M} a+(BA e_j) a(conj BA e_j) <= ||A||^2 sum_j a+(B e'_j) a(conj B e'_j)`.
    DiagonalizationUpper,
    /// `sum_{j<=M} a+(A e_j) a(conj A e_j) <= ||A||^2 N`.
    BasicEstimate,
    /// `sum_{j<=M} a+(A e_j) (N+1) a(conj A e_j) <= ||A||^2 N^2`.
    TechnicalFirst,
    /// `sum_{j<=M} a+(e_j) N a(conj e_j) <= N (N - 1)`.
    TechnicalSecond,
}

impl PsdForm {
    pub const ALL: [PsdForm; 10] = [
        PsdForm::CauchySchwarz {
            sign: Sign::Plus,
            variant: CauchySchwarzVariant::Annihilators,
        },
        PsdForm::CauchySchwarz {
            sign: Sign::Minus,
            variant: CauchySchwarzVariant::Annihilators,
        },
        PsdForm::CauchySchwarz {
            sign: Sign::Plus,
            variant: CauchySchwarzVariant::Mixed,
        },
        PsdForm::CauchySchwarz {
            sign: Sign::Minus,
            variant: CauchySchwarzVariant::Mixed,
        },
        PsdForm::DiagonalizationLower,
        PsdForm::DiagonalizationMiddle,
        PsdForm::DiagonalizationUpper,
        PsdForm::BasicEstimate,
        PsdForm::TechnicalFirst,
        PsdForm::TechnicalSecond,
    ];

    pub fn name(self) -> String {
        match self {
            PsdForm::CauchySchwarz { sign, variant } => {
                let s = match sign {
                    Sign::Plus => "plus",
                    Sign::Minus => "minus",
                };
                let v = match variant {
                    CauchySchwarzVariant::Annihilators => "annihilators",
                    CauchySchwarzVariant::Mixed => "mixed",
                };
                format!("cauchy_schwarz.{v}.{s}")
            }
            PsdForm::DiagonalizationLower => "diagonalization.lower".into(),
            PsdForm::DiagonalizationMiddle => "diagonalization.middle".into(),
            PsdForm::DiagonalizationUpper => "diagonalization.upper".into(),
            PsdForm::BasicEstimate => "basic_estimate".into(),
            PsdForm::TechnicalFirst => "technical.first".into(),
            PsdForm::TechnicalSecond => "technical.second".into(),
        }
    }

    /// Equality forms are checked by `||RHS - LHS|| / scale`.
    pub fn is_equality(self) -> bool {
        matches!(self, PsdForm::DiagonalizationMiddle)
    }

    /// Largest intermediate sector above the checked one.
    fn raise(self) -> usize {
        match self {
            PsdForm::CauchySchwarz {
                variant: CauchySchwarzVariant::Mixed,
                ..
            } => 1,
            _ => 0,
        }
    }
}

/// Coefficient operators and truncated ONS for a form. `b` is ignored by
/// forms that use a single operator; `a` is ignored by `TechnicalSecond`.
#[derive(Debug, Clone)]
pub struct PsdParams {
    pub a: OneParticleOperator,
    pub b: OneParticleOperator,
    pub ons: OrthonormalSystem,
    pub m: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PsdCheck {
    pub result: CheckResult,
    /// `||X - X*|| / scale` of the raw difference `X = RHS - LHS`.
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
    /// `max(||RHS||_F, ||LHS||_F)`, or 1 when both vanish.
    pub scale: f64,
    /// `||RHS - LHS||_F` after Hermitization.
    pub diff_norm: f64,
}

type Mat = DMatrix<C64>;

struct Ctx<'a> {
    basis: &'a Arc<FockBasis>,
    n: usize,
}

impl Ctx<'_> {
    fn square(&self) -> Mat {
        let k = self.basis.sector_dim(self.n);
        Mat::zeros(k, k)
    }

    fn identity(&self) -> Mat {
        let k = self.basis.sector_dim(self.n);
        Mat::identity(k, k)
    }

    /// Ladder matrix acting on sector `from`.
    fn ladder(&self, f: &OneParticleVector, ladder: Ladder, from: usize) -> Result<Mat> {
        match (ladder, from) {
            (Ladder::Annihilate, 0) => Ok(Mat::zeros(0, 1)),
            _ => ladder_sector_matrix(self.basis, f, ladder, from),
        }
    }

    /// `a+(u) w(n-1) a(conj v)` on sector `n`, where `w` scales the
    /// intermediate sector.
    fn hop(&self, u: &OneParticleVector, v: &OneParticleVector, w: f64) -> Result<Mat> {
        if self.n == 0 {
            return Ok(self.square());
        }
        let down = self.ladder(&v.conjugate(), Ladder::Annihilate, self.n)?;
        let up = self.ladder(u, Ladder::Create, self.n - 1)?;
        Ok((up * down) * C64::new(w, 0.0))
    }
}

fn columns(op: &OneParticleOperator, es: &[OneParticleVector]) -> Result<Vec<OneParticleVector>> {
    es.iter().map(|e| op.apply(e)).collect()
}

/// Left singular vectors of `A P_M`, all `d` of them, and the coefficient
/// matrix `(A_M* e'_j, A_M* e'_k)`.
fn singular_frame(
    a: &OneParticleOperator,
    ons: &OrthonormalSystem,
    m: usize,
) -> Result<(Vec<OneParticleVector>, Mat)> {
    let am = a.restricted_to(ons, m)?;
    let d = a.dim();
    let svd = am.matrix().clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let frame: Vec<OneParticleVector> = (0..d)
        .map(|j| OneParticleVector::from_dvector(u.column(j).into_owned()))
        .collect::<Result<_>>()?;
    let umat = u.clone();
    let gram = umat.adjoint() * am.matrix() * am.matrix().adjoint() * umat;
    Ok((frame, gram))
}

fn sides(form: PsdForm, p: &PsdParams, ctx: &Ctx<'_>) -> Result<(Mat, Mat)> {
    let n = ctx.n;
    let es = &p.ons.columns()[..p.m];
    match form {
        PsdForm::CauchySchwarz { sign, variant } => {
            let xs: Vec<OneParticleVector> = columns(&p.a, es)?;
            let ys: Vec<OneParticleVector> = columns(&p.b, es)?;
            let a_ops: Vec<(Mat, usize)> = match variant {
                CauchySchwarzVariant::Annihilators => xs
                    .iter()
                    .map(|x| {
                        Ok((
                            ctx.ladder(&x.conjugate(), Ladder::Annihilate, n)?,
                            n.saturating_sub(1),
                        ))
                    })
                    .collect::<Result<_>>()?,
                CauchySchwarzVariant::Mixed => xs
                    .iter()
                    .map(|x| Ok((ctx.ladder(x, Ladder::Create, n)?, n + 1)))
                    .collect::<Result<_>>()?,
            };
            let mut t = Vec::with_capacity(es.len());
            for y in &ys {
                let mut row = Vec::with_capacity(es.len());
                for (aj, mid) in &a_ops {
                    if variant == CauchySchwarzVariant::Annihilators && n == 0 {
                        row.push(Mat::zeros(0, ctx.basis.sector_dim(0)));
                        continue;
                    }
                    let bk = ctx.ladder(&y.conjugate(), Ladder::Annihilate, *mid)?;
                    row.push(bk * aj);
                }
                t.push(row);
            }
            let (mut lhs, mut rhs) = (ctx.square(), ctx.square());
            // T_kj = b_k a_j
            for (k, row) in t.iter().enumerate() {
                for (j, tkj) in row.iter().enumerate() {
                    rhs += tkj.adjoint() * tkj;
                    lhs += tkj.adjoint() * &t[j][k];
                }
            }
            if sign == Sign::Minus {
                lhs = -lhs;
            }
            Ok((lhs, rhs))
        }
        PsdForm::DiagonalizationLower
        | PsdForm::DiagonalizationMiddle
        | PsdForm::DiagonalizationUpper => {
            let ba = p.b.compose(&p.a)?;
            let mut lhs = ctx.square();
            for f in columns(&ba, es)? {
                lhs += ctx.hop(&f, &f, 1.0)?;
            }
            let (frame, gram) = singular_frame(&p.a, &p.ons, p.m)?;
            let bframe = columns(&p.b, &frame)?;
            match form {
                PsdForm::DiagonalizationLower => Ok((ctx.square(), lhs)),
                PsdForm::DiagonalizationMiddle => {
                    let mut rhs = ctx.square();
                    for (j, u) in bframe.iter().enumerate() {
                        for (k, v) in bframe.iter().enumerate() {
                            if gram[(j, k)] != C64::new(0.0, 0.0) {
                                rhs += ctx.hop(u, v, 1.0)? * gram[(j, k)];
                            }
                        }
                    }
                    Ok((lhs, rhs))
                }
                _ => {
                    let norm = p.a.operator_norm();
                    let mut rhs = ctx.square();
                    for u in &bframe {
                        rhs += ctx.hop(u, u, norm * norm)?;
                    }
                    Ok((lhs, rhs))
                }
            }
        }
        PsdForm::BasicEstimate | PsdForm::TechnicalFirst => {
            let w = if form == PsdForm::BasicEstimate {
                1.0
            } else {
                n as f64
            };
            let mut lhs = ctx.square();
            for f in columns(&p.a, es)? {
                lhs += ctx.hop(&f, &f, w)?;
            }
            let norm = p.a.operator_norm();
            let power = if form == PsdForm::BasicEstimate { 1 } else { 2 };
            let rhs = ctx.identity() * C64::new(norm * norm * (n as f64).powi(power), 0.0);
            Ok((lhs, rhs))
        }
        PsdForm::TechnicalSecond => {
            let w = n.saturating_sub(1) as f64;
            let mut lhs = ctx.square();
            for e in es {
                lhs += ctx.hop(e, e, w)?;
            }
            let rhs = ctx.identity() * C64::new(n as f64 * w, 0.0);
            Ok((lhs, rhs))
        }
    }
}

/// Checks `form` on sector `sector` with relative eigenvalue floor `tol`
/// (equality forms use [`STRUCTURAL_TOL`] on the difference norm instead).
pub fn psd_form_check(
    form: PsdForm,
    params: &PsdParams,
    basis: &Arc<FockBasis>,
    sector: usize,
    tol: f64,
) -> Result<PsdCheck> {
    let d = basis.d();
    for dim in [params.a.dim(), params.b.dim(), params.ons.dim()] {
        if dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: dim,
            });
        }
    }
    if params.m > params.ons.len() {
        return Err(Error::IndexOutOfRange {
            m: params.m,
            len: params.ons.len(),
        });
    }
    if sector + form.raise() > basis.n_max() {
        return Err(Error::TruncationOverflow {
            top_sector: sector,
            n_max: basis.n_max(),
            headroom: form.raise(),
        });
    }
    let ctx = Ctx { basis, n: sector };
    let (lhs, rhs) = sides(form, params, &ctx)?;
    let mut scale = rhs.norm().max(lhs.norm());
    if scale == 0.0 {
        scale = 1.0;
    }
    let raw = &rhs - &lhs;
    let hermiticity_residual = (&raw - raw.adjoint()).norm() / scale;
    let x = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
    let diff_norm = x.norm();
    let min_eigenvalue = if x.nrows() == 0 {
        0.0
    } else {
        x.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    let name = format!("psd.{}.sector{}", form.name(), sector);
    let result = if hermiticity_residual > STRUCTURAL_TOL {
        CheckResult::new(name, hermiticity_residual, STRUCTURAL_TOL)
            .with_witness("difference is not self-adjoint")
    } else if form.is_equality() {
        CheckResult::new(name, diff_norm / scale, STRUCTURAL_TOL)
    } else {
        CheckResult::new(name, (-min_eigenvalue).max(0.0) / scale, tol)
    };
    Ok(PsdCheck {
        result,
        hermiticity_residual,
        min_eigenvalue,
        scale,
        diff_norm,
    })
}
