//! Polynomial one-parameter families of algebra structures on a fixed space.

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDoc, AlgebraError, FiniteAlgebra};
use crate::chains::Cochain;
use crate::exactnum::{PolyQ, Rational, Scalar, MAX_DEGREE};
use crate::operators::cochain_delta;

use super::DeformationError;

/// `m_t(e_i, e_j) = Σ_k c_ijk(t) e_k` with a unit constant in `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationFamily {
    poly: FiniteAlgebra<PolyQ>,
    unit: Option<Vec<Rational>>,
    pub label: Option<String>,
    /// Closed parameter interval on which transport is allowed.
    pub safe_interval: Option<(Rational, Rational)>,
}

/// `ṁ_t`, the entrywise `t`-derivative of the structure constants.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityCocycle {
    pub cochain: Cochain<PolyQ>,
}

impl VelocityCocycle {
    /// `E_t = −ṁ_t`.
    pub fn defect(&self) -> Cochain<PolyQ> {
        self.cochain.scale(&PolyQ::from_i64(-1))
    }

    pub fn at(&self, t: &Rational) -> Cochain<Rational> {
        self.cochain.map(|p| p.eval(t))
    }
}

/// Validates associativity and unit laws as polynomial identities.
pub fn make_family(
    names: Vec<String>,
    structure: Vec<Vec<Vec<PolyQ>>>,
    unit: Option<Vec<Rational>>,
) -> Result<DeformationFamily, DeformationError> {
    let max_deg = structure.iter().flatten().flatten().filter_map(|p| p.degree()).max().unwrap_or(0);
    // associativity multiplies two constants, operator identities at most four
    if 4 * max_deg > MAX_DEGREE {
        return Err(DeformationError::DegreeCap(max_deg));
    }
    let punit = unit.as_ref().map(|u| u.iter().cloned().map(PolyQ::from).collect());
    let poly = FiniteAlgebra::new(names, structure, punit)?;
    Ok(DeformationFamily { poly, unit, label: None, safe_interval: None })
}

impl DeformationFamily {
    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn with_safe_interval(mut self, lo: Rational, hi: Rational) -> Self {
        self.safe_interval = Some((lo, hi));
        self
    }

    pub fn dim(&self) -> usize {
        self.poly.dim()
    }

    pub fn names(&self) -> &[String] {
        self.poly.names()
    }

    pub fn unit(&self) -> Option<&[Rational]> {
        self.unit.as_deref()
    }

    /// The family as one algebra over `Q[t]`.
    pub fn polynomial_algebra(&self) -> &FiniteAlgebra<PolyQ> {
        &self.poly
    }

    pub fn max_degree(&self) -> usize {
        (0..self.dim())
            .flat_map(|i| (0..self.dim()).map(move |j| (i, j)))
            .flat_map(|(i, j)| self.poly.basis_product(i, j).iter().filter_map(|(_, p)| p.degree()).collect::<Vec<_>>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.max_degree() == 0
    }

    /// Whether `[lo, hi]` (either order) lies inside the declared safe interval.
    pub fn covers(&self, s: &Rational, t: &Rational) -> bool {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        match &self.safe_interval {
            None => true,
            Some((a, b)) => a <= lo && hi <= b,
        }
    }

    pub fn fiber(&self, t: &Rational) -> FiniteAlgebra {
        let a = self.poly.map_scalars(|p| p.eval(t));
        debug_assert!(a.check_associative().is_ok());
        a
    }

    pub fn fiber_f64(&self, t: f64) -> FiniteAlgebra<f64> {
        self.poly.map_scalars(|p| p.eval_f64(t))
    }

    pub fn velocity(&self) -> Result<VelocityCocycle, DeformationError> {
        let d = self.dim();
        let cochain = Cochain::from_fn(d, 2, |args| self.poly.basis_product(args[0], args[1]).map(|p| p.derivative()));
        if !cochain_delta(&self.poly, &cochain).is_zero() {
            return Err(DeformationError::Cocycle);
        }
        Ok(VelocityCocycle { cochain })
    }
}

/// The algebra document with polynomial scalars such as `"2*t^2 - 1/3"`,
/// plus an optional safe interval of rational strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyDoc {
    #[serde(flatten)]
    pub algebra: AlgebraDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safe_interval: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl DeformationFamily {
    pub fn from_doc(doc: &FamilyDoc) -> Result<Self, DeformationError> {
        let (names, structure, unit) = doc.algebra.scalars(|s| s.parse::<PolyQ>().map_err(|e| e.to_string()))?;
        let unit = unit
            .map(|u| {
                u.into_iter()
                    .map(|p| if p.degree().unwrap_or(0) == 0 { Ok(p.coeff(0)) } else { Err(DeformationError::PreconditionFailed(format!("unit entry {p} depends on t"))) })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let mut fam = make_family(names, structure, unit)?;
        if let Some([lo, hi]) = &doc.safe_interval {
            let parse = |s: &str| Rational::parse_decimal(s).map_err(|e| DeformationError::Algebra(AlgebraError::Parse(e.to_string())));
            let (lo, hi) = (parse(lo)?, parse(hi)?);
            if lo > hi {
                return Err(DeformationError::PreconditionFailed(format!("safe interval [{lo}, {hi}] is empty")));
            }
            fam = fam.with_safe_interval(lo, hi);
        }
        fam.label = doc.label.clone();
        Ok(fam)
    }

    pub fn to_doc(&self) -> FamilyDoc {
        let mut algebra = self.poly.to_doc();
        algebra.unit = self.unit.as_ref().map(|u| u.iter().map(|c| c.to_string()).collect());
        FamilyDoc {
            algebra,
            safe_interval: self.safe_interval.as_ref().map(|(lo, hi)| [lo.to_string(), hi.to_string()]),
            label: self.label.clone(),
        }
    }
}

/// The family with `m_t = m` for all `t`.
pub fn constant_family(a: &FiniteAlgebra) -> DeformationFamily {
    let poly = a.map_scalars(|c| PolyQ::constant(c.clone()));
    DeformationFamily { poly, unit: a.unit().map(|u| u.to_vec()), label: Some("constant".into()), safe_interval: None }
}

fn q(n: i64) -> Rational {
    Rational::integer(n)
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn zeros(d: usize) -> Vec<Vec<Vec<PolyQ>>> {
    vec![vec![vec![PolyQ::zero(); d]; d]; d]
}

/// Basis `{1, x}` with `x² = t·1`; safe interval `[1/2, 4]`.
pub fn x_squared_family() -> DeformationFamily {
    let mut s = zeros(2);
    s[0][0][0] = PolyQ::one();
    s[0][1][1] = PolyQ::one();
    s[1][0][1] = PolyQ::one();
    s[1][1][0] = PolyQ::t();
    make_family(names(&["1", "x"]), s, Some(vec![q(1), q(0)]))
        .expect("x² = t is associative")
        .with_label("x^2 = t")
        .with_safe_interval(Rational::new(1, 2), q(4))
}

/// Basis `{1, x, y}` with `x² = t·y` and every other product of `x, y` zero.
///
/// `ι_E` and `S_E` do not depend on `t` here and are nilpotent.
pub fn x_squared_nilpotent_family() -> DeformationFamily {
    let mut s = zeros(3);
    for i in 0..3 {
        s[0][i][i] = PolyQ::one();
        s[i][0][i] = PolyQ::one();
    }
    s[1][1][2] = PolyQ::t();
    make_family(names(&["1", "x", "y"]), s, Some(vec![q(1), q(0), q(0)]))
        .expect("associative")
        .with_label("x^2 = t y")
}

/// Basis `{1, x}` with `x² = t²·1`.
pub fn x_squared_t2_family() -> DeformationFamily {
    let mut s = zeros(2);
    s[0][0][0] = PolyQ::one();
    s[0][1][1] = PolyQ::one();
    s[1][0][1] = PolyQ::one();
    s[1][1][0] = PolyQ::t().mul(&PolyQ::t());
    make_family(names(&["1", "x"]), s, Some(vec![q(1), q(0)])).expect("associative").with_label("x^2 = t^2")
}

/// Rees-type family of a filtered algebra: `c_ijk(t) = c_ijk · t^{deg i + deg j − deg k}`.
///
/// `fiber(1)` is the algebra itself and `fiber(0)` its associated graded.
pub fn from_filtered(a: &FiniteAlgebra, degrees: &[usize]) -> Result<DeformationFamily, DeformationError> {
    let d = a.dim();
    if degrees.len() != d {
        return Err(DeformationError::Filtration(format!("{} degree labels for dimension {d}", degrees.len())));
    }
    if let Some(u) = a.unit() {
        if let Some(i) = (0..d).find(|&i| !u[i].is_zero() && degrees[i] != 0) {
            return Err(DeformationError::Filtration(format!(
                "unit has a component on {} of degree {}; a constant unit must lie in F_0",
                a.names()[i],
                degrees[i]
            )));
        }
    }
    let mut s = zeros(d);
    for i in 0..d {
        for j in 0..d {
            for (k, c) in a.basis_product(i, j).iter() {
                let exp = (degrees[i] + degrees[j]) as isize - degrees[k] as isize;
                if exp < 0 {
                    return Err(DeformationError::Filtration(format!(
                        "{}·{} has a component on {} of degree {} > {}",
                        a.names()[i],
                        a.names()[j],
                        a.names()[k],
                        degrees[k],
                        degrees[i] + degrees[j]
                    )));
                }
                s[i][j][k] = PolyQ::monomial(c.clone(), exp as usize).map_err(|_| DeformationError::DegreeCap(exp as usize))?;
            }
        }
    }
    Ok(make_family(a.names().to_vec(), s, a.unit().map(|u| u.to_vec()))?.with_label("filtered"))
}

impl From<AlgebraError> for DeformationError {
    fn from(e: AlgebraError) -> Self {
        DeformationError::Algebra(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::examples::*;
    use crate::exactnum::SparseVec;

    #[test]
    fn doc_round_trip() {
        let f = x_squared_family();
        let doc = f.to_doc();
        assert_eq!(doc.safe_interval, Some(["1/2".to_string(), "4".to_string()]));
        let json = serde_json::to_string(&doc).unwrap();
        let back = DeformationFamily::from_doc(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn doc_rejects_moving_unit() {
        let mut doc = x_squared_family().to_doc();
        doc.algebra.unit = Some(vec!["1".into(), "t".into()]);
        assert!(matches!(DeformationFamily::from_doc(&doc), Err(DeformationError::PreconditionFailed(_))));
    }

    #[test]
    fn degree_cap() {
        let mut s = zeros(1);
        s[0][0][0] = PolyQ::monomial(q(1), 17).unwrap();
        assert_eq!(make_family(names(&["a"]), s, None), Err(DeformationError::DegreeCap(17)));
    }

    #[test]
    fn covers_is_symmetric() {
        let f = x_squared_family();
        assert!(f.covers(&q(2), &Rational::new(1, 2)));
        assert!(!f.covers(&q(2), &q(5)));
        assert!(constant_family(&complex()).covers(&q(-9), &q(9)));
    }

    #[test]
    fn nilpotent_family_fibers() {
        let f = x_squared_nilpotent_family();
        let a = f.fiber(&q(3));
        assert_eq!(a.mul_sparse(&SparseVec::unit(1), &SparseVec::unit(1)), SparseVec::from_pairs(vec![(2, q(3))]));
        assert!(f.velocity().is_ok());
    }
}
