//! `Ω^m A ≅ C_m(A)` as an `A`-bimodule and the universal cobounding cochain.
//!
//! A basis tensor `(a_0, …, a_m)` of `C_m` stands for `a_0 da_1 … da_m`,
//! with `a_0 = e` meaning the form `da_1 … da_m`.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::chains::{chain_space_dim, encode};
use crate::exactnum::{rank, solve, solve_min_norm, Acc, Rational, Scalar, SparseMat, SparseVec};
use crate::operators::elementary::{emit, Slot};

/// `a · ω` for a basis element `a` of `A` and a basis tensor of `C_m`.
pub fn omega_left_mul<S: Scalar>(alg: &FiniteAlgebra<S>, a: usize, t: &[usize], acc: &mut Acc<S>) {
    let d = alg.dim();
    let mut slots = vec![Slot::Vector(alg.plus_product(a, t[0]))];
    slots.extend(t[1..].iter().map(|&i| Slot::Basis(i)));
    emit(acc, d, &slots, &S::one());
}

/// `ω · a`, expanded with `(da_1)a_2 = d(a_1 a_2) − a_1 da_2`:
///
/// `(a_0 da_1…da_m) a = (−1)^m a_0a_1 da_2…da_{m+1}
///   + Σ_{i=1}^m (−1)^{m−i} a_0 da_1…d(a_i a_{i+1})…da_{m+1}` with `a_{m+1} = a`.
pub fn omega_right_mul<S: Scalar>(alg: &FiniteAlgebra<S>, t: &[usize], a: usize, acc: &mut Acc<S>) {
    let d = alg.dim();
    let m = t.len() - 1;
    let mut ext = t.to_vec();
    ext.push(a);
    let sign = |odd: bool| S::one().signed(odd);
    let mut slots: Vec<Slot<'_, S>> = Vec::with_capacity(m + 1);
    slots.push(Slot::Vector(alg.plus_product(ext[0], ext[1])));
    slots.extend(ext[2..].iter().map(|&i| Slot::Basis(i)));
    emit(acc, d, &slots, &sign(m % 2 == 1));
    for i in 1..=m {
        slots.clear();
        slots.extend(ext[..i].iter().map(|&j| Slot::Basis(j)));
        slots.push(Slot::Vector(alg.plus_product(ext[i], ext[i + 1])));
        slots.extend(ext[i + 2..].iter().map(|&j| Slot::Basis(j)));
        emit(acc, d, &slots, &sign((m - i) % 2 == 1));
    }
}

fn tuple(d: usize, len: usize, mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in (0..len).rev() {
        t[slot] = idx % d;
        idx /= d;
    }
    t
}

fn flat(d: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &i| acc * d + i)
}

/// `φ: A^⊗n → Ω^{n+1}A`, one `C_{n+1}` vector per argument tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct CoboundingCochain {
    pub n: usize,
    d: usize,
    values: Vec<SparseVec<Rational>>,
}

impl CoboundingCochain {
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn value(&self, args: &[usize]) -> &SparseVec<Rational> {
        &self.values[flat(self.d, args)]
    }

    pub fn values(&self) -> &[SparseVec<Rational>] {
        &self.values
    }

    /// All coefficients, argument-major.
    pub fn flatten(&self) -> SparseVec<Rational> {
        let w = chain_space_dim(self.d, self.n as isize + 1);
        let pairs = self.values.iter().enumerate().flat_map(|(u, v)| v.iter().map(move |(i, x)| (u * w + i, x.clone()))).collect();
        SparseVec::from_pairs(pairs)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }

    /// Whether `δφ = d^{⊗(n+1)}` holds exactly on `alg`.
    pub fn verify(&self, alg: &FiniteAlgebra) -> bool {
        let (m, rhs) = coboundary_system(alg, self.n);
        m.mul_vec(&self.flatten()) == rhs
    }
}

/// Ranks of the coefficient and augmented matrices of `δφ = d^{⊗(n+1)}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub n: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub augmented_rank: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UniversalCoboundary {
    Solvable(CoboundingCochain),
    Unsolvable(RankCertificate),
}

impl UniversalCoboundary {
    pub fn is_solvable(&self) -> bool {
        matches!(self, UniversalCoboundary::Solvable(_))
    }

    pub fn cochain(&self) -> Option<&CoboundingCochain> {
        match self {
            UniversalCoboundary::Solvable(c) => Some(c),
            UniversalCoboundary::Unsolvable(_) => None,
        }
    }
}

/// The matrix of `φ ↦ δφ` on `C^n(A, Ω^{n+1}A)` and the flattened `d^{⊗(n+1)}`.
///
/// `(δφ)(a_1…a_{n+1}) = a_1φ(a_2…) + Σ_i (−1)^i φ(…a_i a_{i+1}…) + (−1)^{n+1} φ(a_1…a_n)a_{n+1}`.
/// Unknown `(u, w)` sits at `u·dim Ω^{n+1} + w`, equation `(r, w')` at `r·dim Ω^{n+1} + w'`.
pub fn coboundary_system(alg: &FiniteAlgebra, n: usize) -> (SparseMat<Rational>, SparseVec<Rational>) {
    let d = alg.dim();
    let w_dim = chain_space_dim(d, n as isize + 1);
    let n_args = d.pow(n as u32);
    let mut cols: Vec<Acc<Rational>> = (0..n_args * w_dim).map(|_| Acc::new()).collect();
    let mut acc = Acc::new();
    let push = |cols: &mut Vec<Acc<Rational>>, col: usize, row_base: usize, v: &SparseVec<Rational>, c: &Rational| {
        for (i, x) in v.iter() {
            cols[col].push(row_base + i, x.mul(c));
        }
    };
    let one = Rational::one();
    for r in 0..d.pow(n as u32 + 1) {
        let args = tuple(d, n + 1, r);
        let row_base = r * w_dim;
        for w in 0..w_dim {
            let wt = crate::chains::decode(d, n + 1, w).expect("in range");
            // a_1 φ(a_2 … a_{n+1})
            omega_left_mul(alg, args[0], &wt, &mut acc);
            let v = acc.finish();
            push(&mut cols, flat(d, &args[1..]) * w_dim + w, row_base, &v, &one);
            // (−1)^{n+1} φ(a_1 … a_n) a_{n+1}
            omega_right_mul(alg, &wt, args[n], &mut acc);
            let v = acc.finish();
            push(&mut cols, flat(d, &args[..n]) * w_dim + w, row_base, &v, &one.signed(n % 2 == 0));
            // (−1)^i φ(… a_i a_{i+1} …)
            for i in 1..=n {
                let sgn = one.signed(i % 2 == 1);
                for (k, c) in alg.basis_product(args[i - 1], args[i]).iter() {
                    let mut merged = args[..i - 1].to_vec();
                    merged.push(k);
                    merged.extend_from_slice(&args[i + 1..]);
                    cols[flat(d, &merged) * w_dim + w].push(row_base + w, c.mul(&sgn));
                }
            }
        }
    }
    let rows = d.pow(n as u32 + 1) * w_dim;
    let m = SparseMat::from_columns(rows, cols.iter_mut().map(|a| a.finish()).collect());
    let rhs = SparseVec::from_pairs(
        (0..d.pow(n as u32 + 1))
            .map(|r| {
                let mut t = vec![d];
                t.extend(tuple(d, n + 1, r));
                (r * w_dim + encode(d, n + 1, &t).expect("in range"), Rational::one())
            })
            .collect(),
    );
    (m, rhs)
}

fn unflatten(d: usize, n: usize, x: &SparseVec<Rational>) -> CoboundingCochain {
    let w_dim = chain_space_dim(d, n as isize + 1);
    let mut values = vec![Vec::new(); d.pow(n as u32)];
    for (i, c) in x.iter() {
        values[i / w_dim].push((i % w_dim, c.clone()));
    }
    CoboundingCochain { n, d, values: values.into_iter().map(SparseVec::from_pairs).collect() }
}

fn certificate(m: &SparseMat<Rational>, rhs: &SparseVec<Rational>, n: usize) -> RankCertificate {
    let mut cols = m.columns().to_vec();
    cols.push(rhs.clone());
    let aug = SparseMat::from_columns(m.nrows(), cols);
    RankCertificate { n, unknowns: m.ncols(), equations: m.nrows(), rank: rank(m), augmented_rank: rank(&aug) }
}

/// Exact solve of `δφ = d^{⊗(n+1)}`; free variables are zero.
pub fn solve_universal_coboundary(alg: &FiniteAlgebra, n: usize) -> UniversalCoboundary {
    let (m, rhs) = coboundary_system(alg, n);
    match solve(&m, &rhs) {
        Some(x) => UniversalCoboundary::Solvable(unflatten(alg.dim(), n, &x)),
        None => UniversalCoboundary::Unsolvable(certificate(&m, &rhs, n)),
    }
}

/// The solution of least Euclidean norm, used along a family.
pub fn solve_universal_coboundary_min_norm(alg: &FiniteAlgebra, n: usize) -> UniversalCoboundary {
    let (m, rhs) = coboundary_system(alg, n);
    match solve_min_norm(&m, &rhs) {
        Some(x) => UniversalCoboundary::Solvable(unflatten(alg.dim(), n, &x)),
        None => UniversalCoboundary::Unsolvable(certificate(&m, &rhs, n)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bidimension {
    /// Smallest `n` with `δφ = d^{⊗(n+1)}` solvable.
    AtMost(usize),
    NotFound(usize),
}

pub fn bidimension_upper(alg: &FiniteAlgebra, n_max: usize) -> Bidimension {
    (0..=n_max)
        .find(|&n| solve_universal_coboundary(alg, n).is_solvable())
        .map_or(Bidimension::NotFound(n_max), Bidimension::AtMost)
}

/// `α(a_0 da_1…da_k) = a_0 φ(a_1…a_n) da_{n+1}…da_k` as a map `C_k → C_{k+1}`, `k ≥ n`.
pub fn alpha_matrix(alg: &FiniteAlgebra, phi: &CoboundingCochain, k: usize) -> SparseMat<Rational> {
    let d = alg.dim();
    let n = phi.n;
    assert!(k >= n, "α is defined from degree n = {n} on, got {k}");
    let src = chain_space_dim(d, k as isize);
    let tgt = chain_space_dim(d, k as isize + 1);
    let mut acc = Acc::new();
    let cols = (0..src)
        .map(|idx| {
            let t = crate::chains::decode(d, k, idx).expect("in range");
            let tail = flat(d, &t[n + 1..]);
            let shift = d.pow((k - n) as u32);
            for (w, c) in phi.value(&t[1..=n]).iter() {
                let wt = crate::chains::decode(d, n + 1, w).expect("in range");
                let mut slots = vec![Slot::Vector(alg.plus_product(t[0], wt[0]))];
                slots.extend(wt[1..].iter().map(|&i| Slot::Basis(i)));
                let mut inner = Acc::new();
                emit(&mut inner, d, &slots, c);
                for (j, x) in inner.finish().iter() {
                    acc.push(j * shift + tail, x.clone());
                }
            }
            acc.finish()
        })
        .collect();
    SparseMat::from_columns(tgt, cols)
}
