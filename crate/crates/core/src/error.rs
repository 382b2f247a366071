use thiserror::Error;

/// Errors raised by the one-particle, Fock-space and quadratic-operator layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("one-particle dimension must be at least 1")]
    EmptyDimension,

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("cannot fit {m} orthonormal vectors into dimension {d}")]
    TooManyVectors { m: usize, d: usize },

    #[error("vectors are not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("permanent of a {n}x{n} matrix exceeds the size guard ({max})")]
    PermanentTooLarge { n: usize, max: usize },

    #[error("Fock basis dimension {dim} exceeds the guard {max}")]
    BasisTooLarge { dim: usize, max: usize },

    #[error("state has support on sector {top_sector}, operator needs {headroom} free sector(s) below n_max = {n_max}")]
    TruncationOverflow {
        top_sector: usize,
        n_max: usize,
        headroom: usize,
    },

    #[error("states live on different Fock bases")]
    BasisMismatch,

    #[error("sector {sector} outside 0..={n_max}")]
    SectorOutOfRange { sector: usize, n_max: usize },

    #[error("partial-sum index {m} exceeds orthonormal system size {len}")]
    IndexOutOfRange { m: usize, len: usize },

    #[error("invalid index range {from}..={to} for orthonormal system of size {len}")]
    InvalidRange { from: usize, to: usize, len: usize },

    #[error("operator is not symmetric (A^T != A, residual {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("closed form has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },

    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("unknown occupation vector")]
    UnknownOccupation,
}

pub type Result<T> = std::result::Result<T, Error>;
