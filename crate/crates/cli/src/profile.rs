//! Named generators for coefficient operators and states.

use std::sync::Arc;

use fockbound_core::rng::{derive_seed, rng_from_seed};
use fockbound_core::verifier::diagonal_profile;
use fockbound_core::{FockBasis, FockVector, OneParticleOperator, OneParticleVector, Result};
use serde::{Deserialize, Serialize};

fn one() -> f64 {
    1.0
}

fn first() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Profile {
    #[default]
    Identity,
    /// `diag(scale * j^exponent)`, `j = 1..=d`.
    Diagonal {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// Complex Gaussian entries; the seed defaults to one derived from the
    /// run seed and the block name.
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Exchanges modes 1 and 2, zero elsewhere.
    Swap,
    /// `e_left e_right^T`, one-based mode indices.
    RankOne {
        #[serde(default = "first")]
        left: usize,
        #[serde(default = "first")]
        right: usize,
    },
}

impl Profile {
    pub fn validate(&self, d: usize) -> std::result::Result<(), String> {
        match *self {
            Profile::Diagonal { exponent, scale }
                if !(exponent.is_finite() && scale.is_finite()) =>
            {
                Err("diagonal exponent and scale must be finite".into())
            }
            Profile::Swap if d < 2 => Err("swap needs d >= 2".into()),
            Profile::RankOne { left, right }
                if left == 0 || right == 0 || left > d || right > d =>
            {
                Err(format!("rank-one mode indices must lie in 1..={d}"))
            }
            _ => Ok(()),
        }
    }

    /// Whether the generated operator satisfies `A^T = A` for every `d`.
    pub fn is_symmetric(&self) -> bool {
        match *self {
            Profile::Identity | Profile::Diagonal { .. } | Profile::Swap => true,
            Profile::RankOne { left, right } => left == right,
            Profile::Random { .. } => false,
        }
    }

    pub fn build(&self, d: usize, run_seed: u64, label: &str) -> Result<OneParticleOperator> {
        match *self {
            Profile::Identity => Ok(OneParticleOperator::identity(d)),
            Profile::Diagonal { exponent, scale } => diagonal_profile(d, exponent, scale),
            Profile::Random { seed } => {
                let seed =
                    seed.unwrap_or_else(|| derive_seed(run_seed, &format!("{label}.profile")));
                Ok(OneParticleOperator::random(d, &mut rng_from_seed(seed)))
            }
            Profile::Swap => {
                let mut rows = vec![vec![0.0; d]; d];
                rows[0][1] = 1.0;
                rows[1][0] = 1.0;
                OneParticleOperator::from_real_rows(&rows)
            }
            Profile::RankOne { left, right } => OneParticleOperator::rank_one(
                &OneParticleVector::basis(d, left - 1),
                &OneParticleVector::basis(d, right - 1),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    #[default]
    Vacuum,
    /// Normalized complex Gaussian state on the listed sectors.
    Random {
        sectors: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl StateSpec {
    pub fn top_sector(&self) -> usize {
        match self {
            StateSpec::Vacuum => 0,
            StateSpec::Random { sectors, .. } => sectors.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn build(&self, basis: &Arc<FockBasis>, run_seed: u64, label: &str) -> Result<FockVector> {
        match self {
            StateSpec::Vacuum => Ok(FockVector::vacuum(basis)),
            StateSpec::Random { sectors, seed } => {
                let seed = seed.unwrap_or_else(|| derive_seed(run_seed, &format!("{label}.state")));
                FockVector::random(basis, sectors, &mut rng_from_seed(seed))
            }
        }
    }
}
