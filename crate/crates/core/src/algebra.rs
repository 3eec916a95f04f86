//! Finite-dimensional associative algebras given by structure constants.

use serde::{Deserialize, Serialize};

use crate::exactnum::{Rational, Scalar, SparseVec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("AssociativityError on ({i},{j},{k}): (ab)c = {lhs} but a(bc) = {rhs}, residual {residual}")]
    Associativity { i: String, j: String, k: String, lhs: String, rhs: String, residual: String },
    #[error("UnitError: unit law fails on basis element {0}")]
    Unit(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// The JSON exchange form: scalars are strings such as `"3/4"` or `"-0.5"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDoc {
    pub dim: usize,
    pub basis: Vec<String>,
    pub unit: Option<Vec<String>>,
    pub structure: Vec<Vec<Vec<String>>>,
}

impl AlgebraDoc {
    /// Parses every scalar with `parse`, checking `dim` against the basis.
    pub fn scalars<S>(
        &self,
        parse: impl Fn(&str) -> Result<S, String>,
    ) -> Result<(Vec<String>, Vec<Vec<Vec<S>>>, Option<Vec<S>>), AlgebraError> {
        if self.basis.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: self.basis.len() });
        }
        let p = |s: &String| parse(s).map_err(AlgebraError::Parse);
        let structure = self
            .structure
            .iter()
            .map(|r| r.iter().map(|v| v.iter().map(p).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let unit = self.unit.as_ref().map(|u| u.iter().map(p).collect::<Result<Vec<_>, _>>()).transpose()?;
        Ok((self.basis.clone(), structure, unit))
    }
}

impl FiniteAlgebra<Rational> {
    pub fn from_doc(doc: &AlgebraDoc) -> Result<Self, AlgebraError> {
        let (names, structure, unit) = doc.scalars(|s| Rational::parse_decimal(s).map_err(|e| e.to_string()))?;
        FiniteAlgebra::new(names, structure, unit)
    }
}

impl<S: Scalar> FiniteAlgebra<S> {
    pub fn to_doc(&self) -> AlgebraDoc {
        AlgebraDoc {
            dim: self.dim,
            basis: self.names.clone(),
            unit: self.unit.as_ref().map(|u| u.iter().map(|c| c.to_string()).collect()),
            structure: self.structure().into_iter().map(|r| r.into_iter().map(|v| v.into_iter().map(|c| c.to_string()).collect()).collect()).collect(),
        }
    }
}

/// Associative algebra with basis `e_0..e_{d-1}` and `e_i e_j = Σ_k c[i][j][k] e_k`.
///
/// The product table is cached in sparse form together with the table of the
/// unitization `A_+`, whose extra basis index `d` is the adjoined unit `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAlgebra<S = Rational> {
    dim: usize,
    names: Vec<String>,
    structure: Vec<S>,
    unit: Option<Vec<S>>,
    table: Vec<SparseVec<S>>,
    plus: Vec<SparseVec<S>>,
}

impl<S: Scalar> FiniteAlgebra<S> {
    /// Validates associativity and the unit laws exhaustively.
    pub fn new(
        names: Vec<String>,
        structure: Vec<Vec<Vec<S>>>,
        unit: Option<Vec<S>>,
    ) -> Result<Self, AlgebraError> {
        let a = Self::new_unchecked(names, structure, unit)?;
        a.check_associative()?;
        a.check_unit()?;
        Ok(a)
    }

    /// Builds without the associativity check, so that callers can report
    /// their own failures. Shapes are still checked.
    pub fn new_unchecked(
        names: Vec<String>,
        structure: Vec<Vec<Vec<S>>>,
        unit: Option<Vec<S>>,
    ) -> Result<Self, AlgebraError> {
        let d = names.len();
        if structure.len() != d
            || structure.iter().any(|r| r.len() != d || r.iter().any(|v| v.len() != d))
        {
            return Err(AlgebraError::Shape(format!("structure must be {d}x{d}x{d}")));
        }
        if let Some(u) = &unit {
            if u.len() != d {
                return Err(AlgebraError::DimensionMismatch { expected: d, got: u.len() });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if n == "e" {
                return Err(AlgebraError::Shape("basis name \"e\" is reserved for the adjoined unit".into()));
            }
            if !seen.insert(n) {
                return Err(AlgebraError::Shape(format!("duplicate basis name {n}")));
            }
        }
        let flat: Vec<S> = structure.into_iter().flatten().flatten().collect();
        Ok(Self::from_flat(names, flat, unit))
    }

    fn from_flat(names: Vec<String>, structure: Vec<S>, unit: Option<Vec<S>>) -> Self {
        let d = names.len();
        let table: Vec<SparseVec<S>> = (0..d * d)
            .map(|ij| SparseVec::from_dense(&structure[ij * d..(ij + 1) * d]))
            .collect();
        let mut plus = Vec::with_capacity((d + 1) * (d + 1));
        for i in 0..=d {
            for j in 0..=d {
                plus.push(if i == d {
                    SparseVec::unit(j)
                } else if j == d {
                    SparseVec::unit(i)
                } else {
                    table[i * d + j].clone()
                });
            }
        }
        FiniteAlgebra { dim: d, names, structure, unit, table, plus }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn unit(&self) -> Option<&[S]> {
        self.unit.as_deref()
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &S {
        &self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure(&self) -> Vec<Vec<Vec<S>>> {
        let d = self.dim;
        (0..d)
            .map(|i| (0..d).map(|j| (0..d).map(|k| self.constant(i, j, k).clone()).collect()).collect())
            .collect()
    }

    /// `e_i e_j` for basis indices of `A`.
    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVec<S> {
        &self.table[i * self.dim + j]
    }

    /// Product in `A_+`; index `dim` is the adjoined unit.
    pub fn plus_product(&self, i: usize, j: usize) -> &SparseVec<S> {
        &self.plus[i * (self.dim + 1) + j]
    }

    /// Bilinear product of coordinate vectors.
    pub fn multiply(&self, u: &[S], v: &[S]) -> Result<Vec<S>, AlgebraError> {
        for w in [u, v] {
            if w.len() != self.dim {
                return Err(AlgebraError::DimensionMismatch { expected: self.dim, got: w.len() });
            }
        }
        Ok(self.mul_sparse(&SparseVec::from_dense(u), &SparseVec::from_dense(v)).to_dense(self.dim))
    }

    pub fn mul_sparse(&self, u: &SparseVec<S>, v: &SparseVec<S>) -> SparseVec<S> {
        let mut pairs = Vec::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                let ab = a.mul(b);
                for (k, c) in self.basis_product(i, j).iter() {
                    pairs.push((k, ab.mul(c)));
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// Product in `A_+` of sparse vectors over `0..=dim`.
    pub fn mul_plus(&self, u: &SparseVec<S>, v: &SparseVec<S>) -> SparseVec<S> {
        let mut pairs = Vec::new();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                let ab = a.mul(b);
                for (k, c) in self.plus_product(i, j).iter() {
                    pairs.push((k, ab.mul(c)));
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn format_element(&self, v: &SparseVec<S>) -> String {
        if v.is_zero() {
            return "0".into();
        }
        v.iter()
            .map(|(i, c)| {
                let name = self.names.get(i).map_or("e", |s| s.as_str());
                if c.is_one() {
                    name.to_string()
                } else {
                    format!("({c})*{name}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn check_associative(&self) -> Result<(), AlgebraError> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let ij = self.basis_product(i, j);
                for k in 0..d {
                    let ek = SparseVec::unit(k);
                    let lhs = self.mul_sparse(ij, &ek);
                    let rhs = self.mul_sparse(&SparseVec::unit(i), self.basis_product(j, k));
                    if lhs != rhs {
                        return Err(AlgebraError::Associativity {
                            i: self.names[i].clone(),
                            j: self.names[j].clone(),
                            k: self.names[k].clone(),
                            lhs: self.format_element(&lhs),
                            rhs: self.format_element(&rhs),
                            residual: self.format_element(&lhs.sub(&rhs)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_unit(&self) -> Result<(), AlgebraError> {
        let Some(u) = &self.unit else { return Ok(()) };
        let u = SparseVec::from_dense(u);
        for j in 0..self.dim {
            let ej = SparseVec::unit(j);
            if self.mul_sparse(&u, &ej) != ej || self.mul_sparse(&ej, &u) != ej {
                return Err(AlgebraError::Unit(self.names[j].clone()));
            }
        }
        Ok(())
    }

    /// `A_+ = A ⊕ R` as an algebra in its own right, new unit last.
    pub fn unitize(&self) -> FiniteAlgebra<S> {
        let d = self.dim;
        let n = d + 1;
        let mut flat = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in 0..n {
                for (k, c) in self.plus_product(i, j).iter() {
                    flat[(i * n + j) * n + k] = c.clone();
                }
            }
        }
        let mut names = self.names.clone();
        names.push(fresh_name(&self.names, "1+"));
        let mut unit = vec![S::zero(); n];
        unit[d] = S::one();
        Self::from_flat(names, flat, Some(unit))
    }

    /// `M_N(A)`, basis `E_pq ⊗ a` at index `(p N + q) d + a`.
    pub fn matrix_algebra(&self, n: usize) -> FiniteAlgebra<S> {
        assert!(n >= 1, "matrix size must be positive");
        let d = self.dim;
        let big = n * n * d;
        let idx = |p: usize, q: usize, a: usize| (p * n + q) * d + a;
        let mut flat = vec![S::zero(); big * big * big];
        for p in 0..n {
            for q in 0..n {
                for s in 0..n {
                    for a in 0..d {
                        for b in 0..d {
                            for (c, v) in self.basis_product(a, b).iter() {
                                let (x, y, z) = (idx(p, q, a), idx(q, s, b), idx(p, s, c));
                                flat[(x * big + y) * big + z] = v.clone();
                            }
                        }
                    }
                }
            }
        }
        let names = (0..n)
            .flat_map(|p| (0..n).map(move |q| (p, q)))
            .flat_map(|(p, q)| {
                self.names.iter().map(move |a| {
                    if d == 1 {
                        format!("E{}{}", p + 1, q + 1)
                    } else {
                        format!("E{}{}.{a}", p + 1, q + 1)
                    }
                })
            })
            .collect();
        let unit = self.unit.as_ref().map(|u| {
            let mut v = vec![S::zero(); big];
            for p in 0..n {
                for a in 0..d {
                    v[idx(p, p, a)] = u[a].clone();
                }
            }
            v
        });
        Self::from_flat(names, flat, unit)
    }

    /// Block-diagonal direct sum; unital iff both summands are.
    pub fn direct_sum(&self, other: &FiniteAlgebra<S>) -> FiniteAlgebra<S> {
        let (d1, d2) = (self.dim, other.dim);
        let n = d1 + d2;
        let mut flat = vec![S::zero(); n * n * n];
        for i in 0..d1 {
            for j in 0..d1 {
                for (k, c) in self.basis_product(i, j).iter() {
                    flat[(i * n + j) * n + k] = c.clone();
                }
            }
        }
        for i in 0..d2 {
            for j in 0..d2 {
                for (k, c) in other.basis_product(i, j).iter() {
                    flat[((d1 + i) * n + d1 + j) * n + d1 + k] = c.clone();
                }
            }
        }
        let mut names = self.names.clone();
        for nm in &other.names {
            names.push(if names.contains(nm) { fresh_name(&names, nm) } else { nm.clone() });
        }
        let unit = match (&self.unit, &other.unit) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Self::from_flat(names, flat, unit)
    }

    /// Applies `f` to every structure constant and unit coordinate.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> FiniteAlgebra<T> {
        FiniteAlgebra::from_flat(
            self.names.clone(),
            self.structure.iter().map(&f).collect(),
            self.unit.as_ref().map(|u| u.iter().map(&f).collect()),
        )
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.dim);
        self.names = names;
        self
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.basis_product(i, j) == self.basis_product(j, i)))
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn fresh_name(taken: &[String], stem: &str) -> String {
    let mut k = 1;
    loop {
        let cand = format!("{stem}{k}");
        if !taken.contains(&cand) {
            return cand;
        }
        k += 1;
    }
}

/// The algebras used throughout the tests and the acceptance suite.
pub mod examples {
    use super::FiniteAlgebra;
    use crate::exactnum::{Rational, Scalar};

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    fn table(d: usize, entries: &[(usize, usize, usize, i64)]) -> Vec<Vec<Vec<Rational>>> {
        let mut s = vec![vec![vec![Rational::zero(); d]; d]; d];
        for &(i, j, k, c) in entries {
            s[i][j][k] = q(c);
        }
        s
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub fn complex() -> FiniteAlgebra {
        FiniteAlgebra::new(names(&["1"]), table(1, &[(0, 0, 0, 1)]), Some(vec![q(1)])).unwrap()
    }

    /// `{1, x}` with `x² = 0`.
    pub fn dual_numbers() -> FiniteAlgebra {
        FiniteAlgebra::new(
            names(&["1", "x"]),
            table(2, &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1)]),
            Some(vec![q(1), q(0)]),
        )
        .unwrap()
    }

    /// `C ⊕ C` with orthogonal idempotents `e1`, `e2`.
    pub fn c_plus_c() -> FiniteAlgebra {
        complex().direct_sum(&complex()).with_names(names(&["e1", "e2"]))
    }

    pub fn m2c() -> FiniteAlgebra {
        complex().matrix_algebra(2)
    }

    /// Upper-triangular 2×2 matrices, basis `(E11, E22, E12)`.
    pub fn upper_triangular() -> FiniteAlgebra {
        FiniteAlgebra::new(
            names(&["E11", "E22", "E12"]),
            table(3, &[(0, 0, 0, 1), (1, 1, 1, 1), (0, 2, 2, 1), (2, 1, 2, 1)]),
            Some(vec![q(1), q(1), q(0)]),
        )
        .unwrap()
    }

    /// The five algebras of the identity suites.
    pub fn suite() -> Vec<(&'static str, FiniteAlgebra)> {
        vec![
            ("C", complex()),
            ("dual numbers", dual_numbers()),
            ("C+C", c_plus_c()),
            ("M2(C)", m2c()),
            ("upper triangular", upper_triangular()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn suite_algebras_validate() {
        for (_, a) in suite() {
            a.check_associative().unwrap();
            a.check_unit().unwrap();
        }
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let mut s = vec![vec![vec![Rational::zero(); 2]; 2]; 2];
        s[0][0][1] = q(1); // a·a = b
        s[0][1][0] = q(1); // a·b = a
        let err = FiniteAlgebra::new(vec!["a".into(), "b".into()], s, None).unwrap_err();
        match err {
            AlgebraError::Associativity { i, j, k, lhs, rhs, .. } => {
                assert_eq!((i.as_str(), j.as_str(), k.as_str()), ("a", "a", "a"));
                assert_eq!(lhs, "0");
                assert_eq!(rhs, "a");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn bad_unit_is_rejected() {
        let a = dual_numbers();
        let err = FiniteAlgebra::new(a.names().to_vec(), a.structure(), Some(vec![q(1), q(1)]));
        assert!(matches!(err, Err(AlgebraError::Unit(_))));
    }

    #[test]
    fn unitization_adds_a_fresh_unit() {
        let a = c_plus_c();
        let p = a.unitize();
        assert_eq!(p.dim(), 3);
        p.check_associative().unwrap();
        p.check_unit().unwrap();
        assert_eq!(p.unit().unwrap(), &[q(0), q(0), q(1)]);
        // old unit e1+e2 is not the unit of A_+
        let old = vec![q(1), q(1), q(0)];
        let e = vec![q(0), q(0), q(1)];
        assert_ne!(p.multiply(&old, &e).unwrap(), e);
    }

    #[test]
    fn unitized_complex_product() {
        // (a,r)(b,s) = (ab + sa + rb, rs)
        let p = complex().unitize();
        let (a, r, b, s) = (q(2), q(3), q(5), q(7));
        let got = p.multiply(&[a.clone(), r.clone()], &[b.clone(), s.clone()]).unwrap();
        let first = a.mul(&b).add(&s.mul(&a)).add(&r.mul(&b));
        assert_eq!(got, vec![first, r.mul(&s)]);
    }

    #[test]
    fn matrix_units_multiply() {
        let m = m2c();
        assert_eq!(m.dim(), 4);
        let e11 = m.basis_index("E11").unwrap();
        let e12 = m.basis_index("E12").unwrap();
        assert_eq!(m.basis_product(e11, e12), &SparseVec::unit(e12));
        assert!(m.basis_product(e12, e11).is_zero());
        assert_eq!(dual_numbers().matrix_algebra(2).dim(), 8);
        assert_eq!(complex().matrix_algebra(1), complex().matrix_algebra(1));
        assert_eq!(dual_numbers().matrix_algebra(1).structure(), dual_numbers().structure());
    }

    #[test]
    fn small_products() {
        let a = dual_numbers();
        assert_eq!(a.multiply(&[q(0), q(1)], &[q(0), q(1)]).unwrap(), vec![q(0), q(0)]);
        let c = c_plus_c();
        assert_eq!(c.multiply(&[q(1), q(0)], &[q(0), q(1)]).unwrap(), vec![q(0), q(0)]);
        assert!(matches!(a.multiply(&[q(1)], &[q(1), q(0)]), Err(AlgebraError::DimensionMismatch { .. })));
    }

    #[test]
    fn reserved_name() {
        let err = FiniteAlgebra::new(vec!["e".into()], vec![vec![vec![q(1)]]], None);
        assert!(matches!(err, Err(AlgebraError::Shape(_))));
    }
}
