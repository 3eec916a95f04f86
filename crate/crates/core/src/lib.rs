pub mod algebra;
pub mod chains;
pub mod chern;
pub mod deformation;
pub mod retract;
pub mod exactnum;
pub mod homology;
pub mod operators;

pub use algebra::FiniteAlgebra;
pub use chains::{ChainVector, Cochain, DualFunctional};
pub use exactnum::{Field, PolyQ, QMatrix, Rational, Scalar, SparseMat, SparseVec};
pub use operators::{OpKind, Operators};
