//! Truncated bosonic Fock space with quadratic second-quantized operators
//! (`dGamma(B)`, `Delta(A)`, `Delta+(C)`) built as partial sums over
//! orthonormal systems, plus a verifier that turns number-operator bounds,
//! operator inequalities, convergence statements and divergence witnesses
//! into numeric checks.

pub mod error;
pub mod fock;
pub mod oneparticle;
pub mod quadratic;
pub mod rng;
pub mod tolerance;
pub mod verifier;

pub use error::{Error, Result};
pub use fock::{
    alpha_norm, apply_annihilate, apply_create, apply_number_power, build_basis,
    build_cyclic_vector, ladder_sector_matrix, sector_matrix, FockBasis, FockVector, Ladder,
    LadderWeight,
};
pub use oneparticle::{
    conjugate_map, hs_norm, inner_product, operator_norm, permanent, random_orthonormal_system,
    Conjugate, OneParticleOperator, OneParticleVector, OrthonormalSystem,
};
pub use quadratic::{
    apply_partial, apply_partial_adjoint, assemble_adjoint_sector_matrix, assemble_sector_matrix,
    delta_cyclic_oracle, dgamma_cyclic_oracle, omega_formula, vacuum_pair_norm_formula,
    QuadraticKind, QuadraticOperatorSpec,
};
pub use tolerance::ToleranceConfig;
