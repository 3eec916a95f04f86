//! Exact scalars and linear algebra.

mod linalg;
mod matrix;
mod poly;
mod ratfunc;
mod rational;
mod scalar;

pub use linalg::{in_column_space, rank, rank_kernel, rref, solve, solve_min_norm};
pub use matrix::{Acc, QMatrix, SparseMat, SparseVec, ToF64};
pub use poly::{PolyQ, MAX_DEGREE};
pub use ratfunc::RatFunc;
pub use rational::Rational;
pub use scalar::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial degree {0} exceeds the cap of {MAX_DEGREE}")]
    DegreeCap(usize),
}
