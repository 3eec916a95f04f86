use std::fmt;

use super::{Field, PolyQ, Rational, Scalar};

/// Element of Q(t), kept as `num/den` with `den` monic and coprime to `num`.
///
/// Used only to decide solvability of linear systems with polynomial
/// coefficients, so degrees stay small and the cap on `PolyQ` is not a concern.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: PolyQ,
    den: PolyQ,
}

impl RatFunc {
    pub fn new(num: PolyQ, den: PolyQ) -> RatFunc {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let l = d.leading();
        if !l.is_one() {
            let li = l.inv();
            n = n.scale(&li);
            d = d.scale(&li);
        }
        RatFunc { num: n, den: d }
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }
}

impl From<PolyQ> for RatFunc {
    fn from(p: PolyQ) -> Self {
        RatFunc { num: p, den: PolyQ::one() }
    }
}

impl Scalar for RatFunc {
    fn zero() -> Self {
        RatFunc { num: PolyQ::zero(), den: PolyQ::one() }
    }

    fn one() -> Self {
        RatFunc { num: PolyQ::one(), den: PolyQ::one() }
    }

    fn from_i64(v: i64) -> Self {
        PolyQ::from_i64(v).into()
    }

    fn from_rational(q: &Rational) -> Self {
        PolyQ::from_rational(q).into()
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return RatFunc::new(self.num.add(&rhs.num), self.den.clone());
        }
        RatFunc::new(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }

    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Field for RatFunc {
    fn inv(&self) -> Self {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    fn pivot_cost(&self) -> f64 {
        let deg = |p: &PolyQ| p.degree().unwrap_or(0) as f64;
        deg(&self.num) + deg(&self.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: &str, d: &str) -> RatFunc {
        RatFunc::new(n.parse().unwrap(), d.parse().unwrap())
    }

    #[test]
    fn normalizes() {
        assert_eq!(r("t^2-1", "2*t-2"), r("1/2*t+1/2", "1"));
        assert!(r("t^2-1", "2*t-2").is_polynomial());
        assert_eq!(r("1", "t").inv(), RatFunc::from(PolyQ::t()));
        assert_eq!(r("1", "t").add(&r("1", "t")), r("2", "t"));
        assert_eq!(r("1", "t").mul(&RatFunc::from(PolyQ::t())), RatFunc::one());
    }
}
