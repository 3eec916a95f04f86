use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, Rational, Scalar};

/// Hard cap on the degree of any `PolyQ`.
pub const MAX_DEGREE: usize = 64;

/// Univariate polynomial in `t` over the rationals.
///
/// `coeffs[i]` is the coefficient of `t^i`; the last stored coefficient is
/// never zero, so the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyQ {
    coeffs: Vec<Rational>,
}

impl PolyQ {
    pub fn new(mut coeffs: Vec<Rational>) -> Result<PolyQ, ExactError> {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() > MAX_DEGREE + 1 {
            return Err(ExactError::DegreeCap(coeffs.len() - 1));
        }
        Ok(PolyQ { coeffs })
    }

    pub fn constant(c: Rational) -> PolyQ {
        PolyQ::new(vec![c]).expect("constant")
    }

    /// `c * t^k`
    pub fn monomial(c: Rational, k: usize) -> Result<PolyQ, ExactError> {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        PolyQ::new(v)
    }

    pub fn t() -> PolyQ {
        PolyQ::monomial(Rational::one(), 1).expect("t")
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn checked_mul(&self, rhs: &PolyQ) -> Result<PolyQ, ExactError> {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Ok(PolyQ::default());
        }
        let deg = self.coeffs.len() + rhs.coeffs.len() - 2;
        if deg > MAX_DEGREE {
            return Err(ExactError::DegreeCap(deg));
        }
        let mut out = vec![Rational::zero(); deg + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j].add_assign(&a.mul(b));
            }
        }
        PolyQ::new(out)
    }

    pub fn scale(&self, c: &Rational) -> PolyQ {
        PolyQ::new(self.coeffs.iter().map(|a| a.mul(c)).collect()).expect("scale keeps degree")
    }

    pub fn derivative(&self) -> PolyQ {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, a)| a.mul(&Rational::integer(i as i64)))
            .collect();
        PolyQ::new(v).expect("derivative lowers degree")
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(t).add(c);
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c.to_f64())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, div: &PolyQ) -> (PolyQ, PolyQ) {
        let dd = div.degree().expect("division by zero polynomial");
        let lead_inv = Rational::one().mul(&super::Field::inv(&div.leading()));
        let mut rem = self.coeffs.clone();
        let mut quo = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap().mul(&lead_inv);
            if !c.is_zero() {
                for (i, b) in div.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].sub(&c.mul(b));
                }
                quo[k] = c;
            }
            rem.pop();
        }
        (PolyQ::new(quo).expect("quotient"), PolyQ::new(rem).expect("remainder"))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &PolyQ) -> PolyQ {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.coeffs.is_empty() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> PolyQ {
        match self.coeffs.last() {
            None => self.clone(),
            Some(l) => self.scale(&super::Field::inv(l)),
        }
    }

    /// Rational roots, by the rational root theorem on the cleared polynomial.
    pub fn rational_roots(&self) -> Vec<Rational> {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Signed, ToPrimitive, Zero};
        let mut p = self.clone();
        let mut roots = Vec::new();
        if p.coeffs.is_empty() {
            return roots;
        }
        // strip t factors
        while p.coeffs.len() > 1 && p.coeffs[0].is_zero() {
            p.coeffs.remove(0);
            if !roots.contains(&Rational::zero()) {
                roots.push(Rational::zero());
            }
        }
        if p.coeffs.len() <= 1 {
            return roots;
        }
        let lcm = p
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(&c.denom()));
        let ints: Vec<BigInt> = p
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let divisors = |n: &BigInt| -> Vec<BigInt> {
            let n = n.abs();
            let Some(m) = n.to_u64() else { return vec![] };
            if m > 1_000_000_000_000 {
                return vec![];
            }
            let mut out = Vec::new();
            let mut i = 1u64;
            while i * i <= m {
                if m % i == 0 {
                    out.push(BigInt::from(i));
                    if i != m / i {
                        out.push(BigInt::from(m / i));
                    }
                }
                i += 1;
            }
            out
        };
        let a0 = &ints[0];
        let an = ints.last().unwrap();
        if a0.is_zero() {
            return roots;
        }
        for pn in divisors(a0) {
            for qd in divisors(an) {
                for sgn in [1, -1] {
                    let r = Rational::from_bigints(&pn * sgn, qd.clone());
                    if !roots.contains(&r) && p.eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

impl Scalar for PolyQ {
    fn zero() -> Self {
        PolyQ::default()
    }

    fn one() -> Self {
        PolyQ::constant(Rational::one())
    }

    fn from_i64(v: i64) -> Self {
        PolyQ::constant(Rational::integer(v))
    }

    fn from_rational(q: &Rational) -> Self {
        PolyQ::constant(q.clone())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i).add(&rhs.coeff(i))).collect();
        PolyQ::new(v).expect("sum keeps degree")
    }

    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let v = (0..n).map(|i| self.coeff(i).sub(&rhs.coeff(i))).collect();
        PolyQ::new(v).expect("difference keeps degree")
    }

    /// Panics past `MAX_DEGREE`; callers that can overflow use `checked_mul`.
    fn mul(&self, rhs: &Self) -> Self {
        match self.checked_mul(rhs) {
            Ok(p) => p,
            Err(e) => panic!("{e}"),
        }
    }

    fn neg(&self) -> Self {
        PolyQ { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => {}
                (_, false) => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyQ({self})")
    }
}

impl FromStr for PolyQ {
    type Err = ExactError;

    /// Grammar: signed sum of terms `c`, `t`, `t^k`, `c*t`, `c*t^k`, with
    /// `c` a rational in the `p/q` form. Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |why: &str| ExactError::Parse(format!("bad polynomial {s:?}: {why}"));
        if compact.is_empty() {
            return Err(err("empty"));
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with(['^', '*', '/']) {
                if cur.is_empty() {
                    return Err(err("dangling sign"));
                }
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err("dangling sign"));
        }
        terms.push((neg, cur));

        let mut acc = PolyQ::zero();
        for (neg, term) in terms {
            let (coef, power) = match term.find('t') {
                None => (term.parse::<Rational>()?, 0usize),
                Some(pos) => {
                    let head = &term[..pos];
                    let tail = &term[pos + 1..];
                    let coef = if head.is_empty() {
                        Rational::one()
                    } else {
                        let h = head.strip_suffix('*').ok_or_else(|| err("expected '*' before t"))?;
                        h.parse::<Rational>()?
                    };
                    let power = if tail.is_empty() {
                        1
                    } else {
                        let p = tail.strip_prefix('^').ok_or_else(|| err("expected '^' after t"))?;
                        p.parse::<usize>().map_err(|_| err("bad exponent"))?
                    };
                    (coef, power)
                }
            };
            if power > MAX_DEGREE {
                return Err(ExactError::DegreeCap(power));
            }
            let m = PolyQ::monomial(coef.signed(neg), power)?;
            acc = acc.add(&m);
        }
        Ok(acc)
    }
}

impl From<Rational> for PolyQ {
    fn from(q: Rational) -> Self {
        PolyQ::constant(q)
    }
}

impl Serialize for PolyQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PolyQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PolyQ {
        s.parse().unwrap()
    }

    #[test]
    fn basic_ring_ops() {
        assert_eq!(p("t^2").derivative(), p("2*t"));
        assert_eq!(p("2*t-1").eval(&Rational::new(3, 2)), Rational::integer(2));
        assert_eq!(p("t+1").mul(&p("t-1")), p("t^2-1"));
        assert!(p("t").sub(&p("t")).is_zero());
    }

    #[test]
    fn grammar_round_trips() {
        for s in ["2*t^2-1", "t", "-t", "0", "1/2*t^3+t-7/3", "-3/4", "t^10"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p(" 1 + t "), p("t+1"));
        assert_eq!(p("-1/2*t+t"), p("1/2*t"));
        assert!("t^".parse::<PolyQ>().is_err());
        assert!("2t".parse::<PolyQ>().is_err());
        assert!("1+".parse::<PolyQ>().is_err());
        assert!("x".parse::<PolyQ>().is_err());
    }

    #[test]
    fn degree_cap() {
        let big = PolyQ::monomial(Rational::one(), 40).unwrap();
        assert!(matches!(big.checked_mul(&big), Err(ExactError::DegreeCap(80))));
        assert!("t^65".parse::<PolyQ>().is_err());
    }

    #[test]
    fn division_and_gcd() {
        let a = p("t^3-t");
        let b = p("t^2+t");
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert_eq!(a.gcd(&b), p("t^2+t"));
        assert_eq!(p("2*t-4").gcd(&p("t^2-4")), p("t-2"));
    }

    #[test]
    fn roots() {
        assert_eq!(p("t^2-1/4").rational_roots(), vec![Rational::new(-1, 2), Rational::new(1, 2)]);
        assert_eq!(p("2*t^2").rational_roots(), vec![Rational::zero()]);
        assert!(p("t^2-2").rational_roots().is_empty());
    }
}
