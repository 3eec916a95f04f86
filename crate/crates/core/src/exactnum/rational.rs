use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, Field, Scalar};

/// Exact rational number in lowest terms with positive denominator.
///
/// Values whose numerator and denominator fit in an `i64` are stored inline;
/// everything else falls back to `BigInt`. The representation is canonical,
/// so derived equality and hashing are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small(i64, i64),
    Big(Box<(BigInt, BigInt)>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn small_fits(v: i128) -> bool {
    v > i64::MIN as i128 && v <= i64::MAX as i128
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        Rational::from_i128(num as i128, den as i128)
    }

    pub fn integer(v: i64) -> Rational {
        Rational::from_i128(v as i128, 1)
    }

    fn from_i128(mut n: i128, mut d: i128) -> Rational {
        debug_assert!(d != 0);
        if d < 0 {
            n = -n;
            d = -d;
        }
        if n == 0 {
            return Rational(Repr::Small(0, 1));
        }
        let g = gcd_u128(n.unsigned_abs(), d as u128) as i128;
        if g > 1 {
            n /= g;
            d /= g;
        }
        if small_fits(n) && small_fits(d) {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Rational(Repr::Big(Box::new((BigInt::from(n), BigInt::from(d)))))
        }
    }

    pub fn from_bigints(n: BigInt, d: BigInt) -> Rational {
        assert!(!d.is_zero(), "zero denominator");
        let (mut n, mut d) = if d.is_negative() { (-n, -d) } else { (n, d) };
        if n.is_zero() {
            return Rational::zero();
        }
        let g = n.gcd(&d);
        if !g.is_one() {
            n /= &g;
            d /= &g;
        }
        match (n.to_i64(), d.to_i64()) {
            (Some(a), Some(b)) if a != i64::MIN => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(Box::new((n, d)))),
        }
    }

    fn big_parts(&self) -> (BigInt, BigInt) {
        match &self.0 {
            Repr::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (b.0.clone(), b.1.clone()),
        }
    }

    pub fn numer(&self) -> BigInt {
        self.big_parts().0
    }

    pub fn denom(&self) -> BigInt {
        self.big_parts().1
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => b.1.is_one(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.0.is_negative(),
        }
    }

    pub fn abs(&self) -> Rational {
        if self.is_negative() {
            Scalar::neg(self)
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => {
                let (n, d) = (&b.0, &b.1);
                let nb = n.bits() as i64;
                let db = d.bits() as i64;
                // shift both into f64 range before dividing
                let shift = (nb.max(db) - 1000).max(0) as usize;
                let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
                let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
                nf / df
            }
        }
    }

    /// Size in bits of numerator plus denominator.
    pub fn height(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => (64 - n.unsigned_abs().leading_zeros() + 64 - d.leading_zeros()) as u64,
            Repr::Big(b) => b.0.bits() + b.1.bits(),
        }
    }

    /// Best rational approximation of `x` within `tol`, by continued fractions.
    pub fn approximate(x: f64, tol: f64) -> Result<Rational, ExactError> {
        if !x.is_finite() {
            return Err(ExactError::Parse(format!("cannot approximate {x}")));
        }
        let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
        let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
        let mut r = x;
        for _ in 0..64 {
            let a = r.floor();
            let ai = BigInt::from(a as i128);
            let h2 = &ai * &h1 + &h0;
            let k2 = &ai * &k1 + &k0;
            h0 = std::mem::replace(&mut h1, h2);
            k0 = std::mem::replace(&mut k1, k2);
            let q = Rational::from_bigints(h1.clone(), k1.clone());
            if (q.to_f64() - x).abs() <= tol {
                return Ok(q);
            }
            let frac = r - a;
            if frac == 0.0 {
                return Ok(q);
            }
            r = 1.0 / frac;
        }
        Err(ExactError::Parse(format!("no rational within {tol} of {x}")))
    }

    /// Parses "p", "p/q" or a decimal such as "0.001" / "1e-3".
    pub fn parse_decimal(s: &str) -> Result<Rational, ExactError> {
        let s = s.trim();
        if let Ok(q) = s.parse::<Rational>() {
            return Ok(q);
        }
        let err = || ExactError::Parse(format!("not a rational: {s:?}"));
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| err())?),
            None => (s, 0),
        };
        let (neg, mantissa) = match mantissa.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int, frac) = match mantissa.find('.') {
            Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
            None => (mantissa, ""),
        };
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        let digits = format!("{int}{frac}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let mut n = BigInt::from_str(&digits).map_err(|_| err())?;
        if neg {
            n = -n;
        }
        let e = exp - frac.len() as i32;
        let ten = BigInt::from(10);
        let q = if e >= 0 {
            Rational::from_bigints(n * num_traits::pow(ten, e as usize), BigInt::one())
        } else {
            Rational::from_bigints(n, num_traits::pow(ten, (-e) as usize))
        };
        Ok(q)
    }

    pub fn pow(&self, k: u32) -> Rational {
        let mut acc = Rational::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    fn from_i64(v: i64) -> Self {
        Rational::integer(v)
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    fn add(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Repr::Small(a, 1), Repr::Small(c, 1)) => match a.checked_add(*c) {
                Some(s) if s != i64::MIN => Rational(Repr::Small(s, 1)),
                _ => Rational::from_i128(*a as i128 + *c as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    Rational::from_i128(a * d + c * b, b * d)
                }
            }
            _ => {
                let (a, b) = self.big_parts();
                let (c, d) = rhs.big_parts();
                Rational::from_bigints(&a * &d + &c * &b, b * d)
            }
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rational::zero(),
            (Repr::Small(a, 1), Repr::Small(c, 1)) => match a.checked_mul(*c) {
                Some(p) if p != i64::MIN => Rational(Repr::Small(p, 1)),
                _ => Rational::from_i128(*a as i128 * *c as i128, 1),
            },
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => {
                let (a, b) = self.big_parts();
                let (c, d) = rhs.big_parts();
                Rational::from_bigints(a * c, b * d)
            }
        }
    }

    fn neg(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(b) => Rational::from_bigints(-b.0.clone(), b.1.clone()),
        }
    }
}

impl Field for Rational {
    fn inv(&self) -> Self {
        match &self.0 {
            Repr::Small(0, _) => panic!("division by zero rational"),
            Repr::Small(n, d) => Rational::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Rational::from_bigints(b.1.clone(), b.0.clone()),
        }
    }

    fn pivot_cost(&self) -> f64 {
        self.height() as f64
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => {
                let (a, b) = self.big_parts();
                let (c, d) = other.big_parts();
                (a * d).cmp(&(c * b))
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.1.is_one() => write!(f, "{}", b.0),
            Repr::Big(b) => write!(f, "{}/{}", b.0, b.1),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ExactError::Parse(format!("not a rational: {s:?}"));
        let int = |p: &str| -> Result<BigInt, ExactError> {
            let p = p.trim();
            let digits = p.strip_prefix(['-', '+']).unwrap_or(p);
            if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
                return Err(err());
            }
            BigInt::from_str(p.strip_prefix('+').unwrap_or(p)).map_err(|_| err())
        };
        match t.split_once('/') {
            Some((n, d)) => {
                let d = int(d)?;
                if d.is_zero() {
                    return Err(ExactError::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Rational::from_bigints(int(n)?, d))
            }
            None => Ok(Rational::from_bigints(int(t)?, BigInt::one())),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_in_lowest_terms() {
        assert_eq!(q("1/2").add(&q("1/3")), q("5/6"));
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(q("-3/-6").to_string(), "1/2");
        assert_eq!(q("6/-4").to_string(), "-3/2");
        assert_eq!(q("1/2").mul(&q("2")), Rational::one());
        assert_eq!(q("7/3").inv(), q("3/7"));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rational::integer(i64::MAX);
        let sq = big.mul(&big);
        assert!(matches!(sq.0, Repr::Big(_)));
        let back = sq.mul(&big.inv());
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(..)));
        let s = sq.to_string();
        assert_eq!(s.parse::<Rational>().unwrap(), sq);
    }

    #[test]
    fn min_value_is_not_inline() {
        let m = Rational::integer(i64::MIN);
        assert_eq!(m.neg().neg(), m);
        assert_eq!(m.add(&Rational::one()).sub(&Rational::one()), m);
    }

    #[test]
    fn decimal_and_approximation() {
        assert_eq!(Rational::parse_decimal("1e-3").unwrap(), q("1/1000"));
        assert_eq!(Rational::parse_decimal("0.25").unwrap(), q("1/4"));
        assert_eq!(Rational::parse_decimal("-2.5e1").unwrap(), q("-25"));
        assert_eq!(Rational::approximate(0.3333333333333, 1e-8).unwrap(), q("1/3"));
        assert_eq!(Rational::approximate(-1.75, 1e-12).unwrap(), q("-7/4"));
    }

    #[test]
    fn rejects_garbage() {
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
        assert!("1.5".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn ordering() {
        assert!(q("1/3") < q("1/2"));
        assert!(q("-1/2") < q("-1/3"));
        let big = Rational::integer(i64::MAX).mul(&Rational::integer(3));
        assert!(big > Rational::integer(i64::MAX));
    }
}
