//! Chain spaces `C_n(A) = A_+ ⊗ A^{⊗n}`, Hochschild cochains and dual functionals.
//!
//! A basis tensor of degree `n ≥ 1` is a multi-index `(i_0, …, i_n)` with
//! `i_0 ≤ d` (index `d` is the adjoined unit `e`) and `i_j < d` otherwise. In
//! degree 0 the space is `A` itself. The flat index is the mixed-radix number
//! `i_0 d^n + i_1 d^{n-1} + … + i_n`.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::exactnum::{ExactError, PolyQ, Rational, Scalar, SparseVec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("tensor index out of range: {0}")]
    OutOfRange(String),
    #[error("degree-0 chains cannot involve the adjoined unit e")]
    UnitInDegreeZero,
    #[error("unknown basis name {0:?}")]
    UnknownName(String),
    #[error(transparent)]
    Scalar(#[from] ExactError),
}

/// `dim C_n(A)`; `d` for `n = 0`, `(d+1) d^n` otherwise. Negative degrees are 0.
pub fn chain_space_dim(d: usize, n: isize) -> usize {
    match n {
        n if n < 0 => 0,
        0 => d,
        n => (d + 1) * d.pow(n as u32),
    }
}

pub fn encode(d: usize, n: usize, t: &[usize]) -> Result<usize, ChainError> {
    if t.len() != n + 1 {
        return Err(ChainError::OutOfRange(format!("expected {} slots, got {}", n + 1, t.len())));
    }
    let first_bound = if n == 0 { d } else { d + 1 };
    if t[0] >= first_bound || t[1..].iter().any(|&i| i >= d) {
        return Err(ChainError::OutOfRange(format!("{t:?} in degree {n} with d = {d}")));
    }
    Ok(t[1..].iter().fold(t[0], |acc, &i| acc * d + i))
}

pub fn decode(d: usize, n: usize, mut idx: usize) -> Result<Vec<usize>, ChainError> {
    if idx >= chain_space_dim(d, n as isize) {
        return Err(ChainError::OutOfRange(format!("flat index {idx} in degree {n} with d = {d}")));
    }
    let mut t = vec![0; n + 1];
    for slot in (1..=n).rev() {
        t[slot] = idx % d;
        idx /= d;
    }
    t[0] = idx;
    Ok(t)
}

/// Decodes into a reusable buffer; no range checks.
pub(crate) fn decode_into(d: usize, mut idx: usize, t: &mut [usize]) {
    for slot in (1..t.len()).rev() {
        t[slot] = idx % d;
        idx /= d;
    }
    t[0] = idx;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Finitely supported chain: one sparse vector per degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainVector<S = Rational> {
    d: usize,
    components: BTreeMap<usize, SparseVec<S>>,
}

impl<S: Scalar> ChainVector<S> {
    pub fn zero(d: usize) -> Self {
        ChainVector { d, components: BTreeMap::new() }
    }

    pub fn dim_of_algebra(&self) -> usize {
        self.d
    }

    /// Sets the degree-`n` component. Panics on out-of-range indices, which
    /// in degree 0 is exactly the exclusion of `e`.
    pub fn set(&mut self, n: usize, v: SparseVec<S>) {
        let cap = chain_space_dim(self.d, n as isize);
        assert!(
            v.max_index().is_none_or(|m| m < cap),
            "index out of range for C_{n} (in degree 0 this excludes e)"
        );
        if v.is_zero() {
            self.components.remove(&n);
        } else {
            self.components.insert(n, v);
        }
    }

    pub fn with(mut self, n: usize, v: SparseVec<S>) -> Self {
        self.set(n, v);
        self
    }

    pub fn component(&self, n: usize) -> Cow<'_, SparseVec<S>> {
        match self.components.get(&n) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(SparseVec::new()),
        }
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.keys().copied()
    }

    pub fn components(&self) -> &BTreeMap<usize, SparseVec<S>> {
        &self.components
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.components.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn parity(&self) -> Parity {
        let even = self.components.keys().any(|n| n % 2 == 0);
        let odd = self.components.keys().any(|n| n % 2 == 1);
        match (even, odd) {
            (true, true) => Parity::Mixed,
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&n, v) in &other.components {
            let s = out.component(n).add(v);
            out.set(n, s);
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = ChainVector::zero(self.d);
        for (&n, v) in &self.components {
            out.set(n, v.scale(c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&S::one().neg()))
    }

    /// Drops every component above degree `n`.
    pub fn truncate(&self, n: usize) -> Self {
        ChainVector { d: self.d, components: self.components.range(..=n).map(|(k, v)| (*k, v.clone())).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ChainVector<T> {
        let mut out = ChainVector::zero(self.d);
        for (&n, v) in &self.components {
            out.set(n, v.map(&f));
        }
        out
    }

    /// Concatenated coordinates over degrees `0..=top`.
    pub fn to_stacked(&self, top: usize) -> SparseVec<S> {
        let mut pairs = Vec::new();
        let mut off = 0;
        for n in 0..=top {
            for (i, x) in self.component(n).iter() {
                pairs.push((off + i, x.clone()));
            }
            off += chain_space_dim(self.d, n as isize);
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn from_stacked(d: usize, top: usize, v: &SparseVec<S>) -> Self {
        let mut out = ChainVector::zero(d);
        let mut off = 0;
        for n in 0..=top {
            let len = chain_space_dim(d, n as isize);
            let part = v.reindex(|i| (i >= off && i < off + len).then(|| i - off));
            out.set(n, part);
            off += len;
        }
        out
    }
}

/// Offsets of each degree `0..=top` inside the stacked space.
pub fn stacked_offsets(d: usize, top: usize) -> Vec<usize> {
    let mut offs = Vec::with_capacity(top + 2);
    let mut acc = 0;
    for n in 0..=top {
        offs.push(acc);
        acc += chain_space_dim(d, n as isize);
    }
    offs.push(acc);
    offs
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum CochainKind {
    General,
    /// The multiplication of `A_+`, the one cochain allowed to see `e`.
    PlusMultiplication,
}

/// A `k`-linear map `A^k → A`, stored as one sparse output vector per
/// argument multi-index (flat, base `d`). Evaluation on `e` gives 0 except for
/// the flagged multiplication cochain of `A_+`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain<S = Rational> {
    order: usize,
    d: usize,
    values: Vec<SparseVec<S>>,
    kind: CochainKind,
}

pub type AValuedCochain<S = Rational> = Cochain<S>;

impl<S: Scalar> Cochain<S> {
    pub fn zero(d: usize, order: usize) -> Self {
        Cochain { order, d, values: vec![SparseVec::new(); d.pow(order as u32)], kind: CochainKind::General }
    }

    /// `values[flat(args)]` is `D(e_{args})`.
    pub fn from_values(d: usize, order: usize, values: Vec<SparseVec<S>>) -> Self {
        assert_eq!(values.len(), d.pow(order as u32), "cochain table has wrong length");
        assert!(values.iter().all(|v| v.max_index().is_none_or(|m| m < d)), "cochain values must lie in A");
        Cochain { order, d, values, kind: CochainKind::General }
    }

    pub fn from_fn(d: usize, order: usize, f: impl Fn(&[usize]) -> SparseVec<S>) -> Self {
        let mut args = vec![0; order];
        let values = (0..d.pow(order as u32))
            .map(|idx| {
                let mut r = idx;
                for slot in (0..order).rev() {
                    args[slot] = r % d;
                    r /= d;
                }
                f(&args)
            })
            .collect();
        Self::from_values(d, order, values)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, 1, |a| SparseVec::unit(a[0]))
    }

    /// The multiplication of `A`, as an ordinary cochain (zero on `e`).
    pub fn multiplication(alg: &FiniteAlgebra<S>) -> Self {
        Self::from_fn(alg.dim(), 2, |a| alg.basis_product(a[0], a[1]).clone())
    }

    /// The multiplication of `A_+`, flagged so that `L_m` may see `e`.
    pub fn plus_multiplication(alg: &FiniteAlgebra<S>) -> Self {
        let mut m = Self::multiplication(alg);
        m.kind = CochainKind::PlusMultiplication;
        m
    }

    pub fn is_plus_multiplication(&self) -> bool {
        self.kind == CochainKind::PlusMultiplication
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[SparseVec<S>] {
        &self.values
    }

    /// `D(e_{args})` with arguments in `A_+`; `None` means zero.
    pub fn eval<'a>(&'a self, alg: &'a FiniteAlgebra<S>, args: &[usize]) -> Option<&'a SparseVec<S>> {
        debug_assert_eq!(args.len(), self.order);
        if args.iter().any(|&i| i == self.d) {
            return match self.kind {
                CochainKind::PlusMultiplication => Some(alg.plus_product(args[0], args[1])),
                CochainKind::General => None,
            };
        }
        let idx = args.iter().fold(0, |acc, &i| acc * self.d + i);
        Some(&self.values[idx])
    }

    /// Multilinear extension to sparse arguments in `A`.
    pub fn eval_multi(&self, alg: &FiniteAlgebra<S>, args: &[SparseVec<S>]) -> SparseVec<S> {
        let mut pairs = Vec::new();
        let mut idx = vec![0usize; args.len()];
        fn rec<S: Scalar>(
            c: &Cochain<S>,
            alg: &FiniteAlgebra<S>,
            args: &[SparseVec<S>],
            k: usize,
            idx: &mut Vec<usize>,
            coef: S,
            out: &mut Vec<(usize, S)>,
        ) {
            if k == args.len() {
                if let Some(val) = c.eval(alg, idx) {
                    for (j, v) in val.iter() {
                        out.push((j, v.mul(&coef)));
                    }
                }
                return;
            }
            for (i, x) in args[k].iter() {
                idx[k] = i;
                rec(c, alg, args, k + 1, idx, coef.mul(x), out);
            }
        }
        rec(self, alg, args, 0, &mut idx, S::one(), &mut pairs);
        SparseVec::from_pairs(pairs)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.order, self.d), (other.order, other.d));
        Cochain {
            order: self.order,
            d: self.d,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect(),
            kind: CochainKind::General,
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Cochain {
            order: self.order,
            d: self.d,
            values: self.values.iter().map(|a| a.scale(c)).collect(),
            kind: CochainKind::General,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&S::one().neg()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Cochain<T> {
        Cochain {
            order: self.order,
            d: self.d,
            values: self.values.iter().map(|v| v.map(&f)).collect(),
            kind: self.kind,
        }
    }

    /// Stable content hash, used as a cache key.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (self.order, self.d, self.kind).hash(&mut h);
        for v in &self.values {
            v.nnz().hash(&mut h);
            for (i, x) in v.iter() {
                i.hash(&mut h);
                x.to_string().hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Seeded random `k`-cochain with entries uniform in `{−2, …, 2}`.
pub fn random_cochain(alg: &FiniteAlgebra, k: usize, seed: u64) -> Cochain {
    let d = alg.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..d.pow(k as u32))
        .map(|_| SparseVec::from_dense(&(0..d).map(|_| Rational::integer(rng.gen_range(-2..=2))).collect::<Vec<_>>()))
        .collect();
    Cochain::from_values(d, k, values)
}

/// Seeded random `k`-cochain on a `d`-dimensional space with polynomial
/// entries of degree `≤ deg`, coefficients in `{−2, …, 2}`.
pub fn random_poly_cochain(d: usize, k: usize, deg: usize, seed: u64) -> Cochain<PolyQ> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entry = || PolyQ::new((0..=deg).map(|_| Rational::integer(rng.gen_range(-2..=2))).collect()).expect("small degree");
    let values = (0..d.pow(k as u32)).map(|_| SparseVec::from_dense(&(0..d).map(|_| entry()).collect::<Vec<_>>())).collect();
    Cochain::from_values(d, k, values)
}

/// A linear functional on `C_n(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunctional<S = Rational> {
    pub order: usize,
    pub coeffs: SparseVec<S>,
}

impl<S: Scalar> DualFunctional<S> {
    pub fn new(order: usize, coeffs: SparseVec<S>) -> Self {
        DualFunctional { order, coeffs }
    }

    pub fn apply(&self, w: &ChainVector<S>) -> S {
        self.coeffs.dot(&w.component(self.order))
    }
}

/// One term of the chain exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    pub tensor: Vec<String>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub degree: usize,
    pub terms: Vec<TermDoc>,
}

/// Reads the chain exchange format. The name `e` stands for the adjoined unit.
pub fn chain_from_doc(alg: &FiniteAlgebra, doc: &[ComponentDoc]) -> Result<ChainVector, ChainError> {
    let d = alg.dim();
    let lookup = |name: &str| -> Result<usize, ChainError> {
        if name == "e" {
            return Ok(d);
        }
        alg.basis_index(name).ok_or_else(|| ChainError::UnknownName(name.to_string()))
    };
    let mut out = ChainVector::zero(d);
    for comp in doc {
        let mut pairs = Vec::new();
        for term in &comp.terms {
            let t = term.tensor.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>()?;
            if comp.degree == 0 && t.first() == Some(&d) {
                return Err(ChainError::UnitInDegreeZero);
            }
            let idx = encode(d, comp.degree, &t)?;
            pairs.push((idx, Rational::parse_decimal(&term.coeff).map_err(ChainError::Scalar)?));
        }
        let v = out.component(comp.degree).add(&SparseVec::from_pairs(pairs));
        out.set(comp.degree, v);
    }
    Ok(out)
}

pub fn chain_to_doc<S: Scalar>(names: &[String], w: &ChainVector<S>) -> Vec<ComponentDoc> {
    let d = names.len();
    w.components()
        .iter()
        .map(|(&n, v)| ComponentDoc {
            degree: n,
            terms: v
                .iter()
                .map(|(i, c)| TermDoc {
                    tensor: decode(d, n, i)
                        .expect("stored index is in range")
                        .into_iter()
                        .map(|k| if k == d { "e".to_string() } else { names[k].clone() })
                        .collect(),
                    coeff: c.to_string(),
                })
                .collect(),
        })
        .collect()
}
