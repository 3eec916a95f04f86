use std::fmt::{Debug, Display};

use super::Rational;

/// Commutative ring used for chain-level coefficients.
///
/// Methods are named rather than operator traits so that `f64`, `Rational`
/// and `PolyQ` can share the generic operator code.
pub trait Scalar: Clone + PartialEq + Debug + Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn add_assign(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn signed(&self, negative: bool) -> Self {
        if negative {
            self.neg()
        } else {
            self.clone()
        }
    }
}

/// Scalars with division. `pivot_cost` ranks candidate pivots, lower is better.
pub trait Field: Scalar {
    fn inv(&self) -> Self;
    fn pivot_cost(&self) -> f64;

    fn div(&self, rhs: &Self) -> Self {
        self.mul(&rhs.inv())
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64()
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

impl Field for f64 {
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn pivot_cost(&self) -> f64 {
        -self.abs()
    }
}
