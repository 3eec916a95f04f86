//! A finite retract of the periodic cyclic cochain complex, built from a
//! solution `φ` of `δφ = d^{⊗(n+1)}`, and transport of `HP` classes on it.

mod complex;
mod transport;
mod universal;

pub use complex::{build_retract, cochain_differential, contraction_alpha, hp_exact_from_retract, Contraction, RetractComplex, RetractDims};
pub use transport::{
    retract_transport, GridPoint, RetractResiduals, RetractTrajectory, RetractTransportOptions, RetractTransportReport, DEFAULT_MAX_JUMP,
};
pub use universal::{
    alpha_matrix, bidimension_upper, coboundary_system, omega_left_mul, omega_right_mul, solve_universal_coboundary,
    solve_universal_coboundary_min_norm, Bidimension, CoboundingCochain, RankCertificate, UniversalCoboundary,
};

use crate::deformation::DeformationError;
use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RetractError {
    #[error("bα + αb ≠ 1 on C_{0}")]
    HomotopyIdentityFailed(usize),
    #[error("rank: {0}")]
    RankError(String),
    #[error("{0}")]
    IdentityFailed(String),
    #[error("δφ = d^(n+1) has no solution on the fiber at {0}")]
    SolvabilityLost(Rational),
    #[error("φ jumps by {jump:e} at {u}")]
    GridDiscontinuity { u: Rational, jump: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
}
