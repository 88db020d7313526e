//! Finite group cohomology: H¹ and its restrictions, Sha¹_cyc, cup products, H² with
//! Z/p^k and Q/Z-proxy coefficients, the Bogomolov multiplier, and lifting through
//! abelian kernels (including the staged solver for unitriangular quotients).

use thiserror::Error;

use crate::modarith::ArithError;
use crate::unigroup::UniError;

mod embed;
mod group;
mod h1;
mod h2;
mod lift;
mod module;

pub use embed::{
    brute_force_lifts, solve_embedding, solve_embedding_to, EmbeddingOutcome, KernelSpec, Level, SolverOptions, SolverStats,
    DEFAULT_MAX_NODES,
};
pub use group::{FiniteGroup, MAX_TABLE_ORDER};
pub use h1::{h1, restrict_h1, sha1_cyc, H1Basis, H1Subgroup, RestrictionMap};
pub use h2::{
    bogomolov, bogomolov_via_restriction, h2_bar, h2_full_bar_dim, h2_qz_proxy, same_b0, BogomolovPart, BogomolovReport, H2Classes,
    QzProxyPart, FULL_BAR_MAX_ORDER, H2_MAX_ORDER,
};
pub use lift::{lift_abelian_kernel, AbelianKernel, LiftOutcome};
pub use module::{
    coboundary1, coboundary2, coboundary2_test, cup11, is_1cocycle, is_2cocycle, Cocycle1, GModule, Pairing,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomError {
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("not a subgroup")]
    NotSubgroup,
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("modulus {0} unsupported (need a prime power)")]
    UnsupportedModulus(u64),
    #[error("not a cocycle: {0}")]
    NotCocycle(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Uni(#[from] UniError),
}

pub type Result<T> = std::result::Result<T, CohomError>;
