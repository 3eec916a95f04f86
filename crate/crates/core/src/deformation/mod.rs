//! One-parameter deformations, the vertical Gauss-Manin operator and
//! transport along it.

mod family;
mod gm;
mod obstruction;
mod transport;

pub use family::{
    constant_family, from_filtered, make_family, x_squared_family, x_squared_nilpotent_family, x_squared_t2_family,
    DeformationFamily, FamilyDoc, VelocityCocycle,
};
pub use gm::{
    boundary_window, chern_parallel_defect, gauge_generator, generator_chain_map_check, gm_chain_map_check, is_window_boundary, window_cocycles, gm_vertical, gm_vertical_poly, vertical_window, vertical_window_poly,
    ChainMapReport, DegreeResidual, ParallelDefect,
};
pub use obstruction::{fiber_witness, triviality_obstruction, Obstruction};
pub use transport::{
    dyson, gauge_independence, nilpotent_exp_matrix, rk4, transport, transport_dual, transport_with_generator, DualTransportReport, Method,
    GaugeReport, PolyMatrix, TransportOptions, TransportReport, TransportReportDoc, TransportResiduals, DEFAULT_STEP, DYSON_MAX_ORDER, DYSON_TOL, RECONSTRUCTION_TOL,
};


use crate::algebra::AlgebraError;
use crate::exactnum::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeformationError {
    #[error("family is not an algebra: {0}")]
    Algebra(AlgebraError),
    #[error("t-derivative of the product is not a Hochschild cocycle")]
    Cocycle,
    #[error("filtration: {0}")]
    Filtration(String),
    #[error("structure constants of t-degree {0} exceed the polynomial cap")]
    DegreeCap(usize),
    #[error("transport from {s} to {t} leaves the safe interval [{lo}, {hi}]")]
    SafeIntervalViolation { s: Rational, t: Rational, lo: Rational, hi: Rational },
    #[error("input has degree {degree} above the window top {top}")]
    WindowOverflow { degree: usize, top: usize },
    #[error("Dyson series did not converge within {0} orders")]
    DysonNotConverged(usize),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}
