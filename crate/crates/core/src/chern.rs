//! Chern characters of idempotents and invertibles, reduced to `C_•(A)` by
//! the generalized trace, and the pairing with cochains.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::chains::{chain_space_dim, ChainVector, DualFunctional, Parity};
use crate::exactnum::{solve, Field, Rational, Scalar, SparseMat, SparseVec, ToF64};
use crate::operators::Operators;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChernError {
    #[error("NotIdempotent: |P² − P| = {0}")]
    NotIdempotent(f64),
    #[error("NotInvertible: {0}")]
    NotInvertible(String),
    #[error("closedness fails in degree {degree} (residual {residual})")]
    NotClosed { degree: usize, residual: f64 },
    #[error("bad cutoff {cutoff} for a {parity:?} chain")]
    Cutoff { cutoff: usize, parity: Parity },
    #[error("parity mismatch: functional of order {order} against a {parity:?} chain")]
    ParityMismatch { order: usize, parity: Parity },
}

/// Scalars a Chern character can be computed over.
pub trait ChernScalar: Field + ToF64 {
    /// Absolute tolerance for idempotence, inverse and closedness checks.
    const TOL: f64;
}

impl ChernScalar for Rational {
    const TOL: f64 = 0.0;
}

impl ChernScalar for f64 {
    const TOL: f64 = 1e-9;
}

/// Even or odd chain supported in degrees up to `cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicChain<S = Rational> {
    pub chain: ChainVector<S>,
    pub parity: Parity,
    pub cutoff: usize,
    /// Highest degree in which `(b+B)ω = 0` was verified; `None` if none was.
    pub closedness_checked_through: Option<usize>,
    /// Max-abs residual of `(b+B)ω` per target degree, the unchecked top
    /// degree included.
    pub residuals: BTreeMap<usize, f64>,
}

impl<S: Scalar> PeriodicChain<S> {
    pub fn component(&self, n: usize) -> SparseVec<S> {
        self.chain.component(n).into_owned()
    }
}

/// JSON form: the chain document plus the bookkeeping fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicChainDoc {
    pub components: Vec<crate::chains::ComponentDoc>,
    pub parity: Parity,
    pub cutoff: usize,
    pub closedness_checked_through: Option<usize>,
}

impl<S: Scalar> PeriodicChain<S> {
    pub fn to_doc(&self, names: &[String]) -> PeriodicChainDoc {
        PeriodicChainDoc {
            components: crate::chains::chain_to_doc(names, &self.chain),
            parity: self.parity,
            cutoff: self.cutoff,
            closedness_checked_through: self.closedness_checked_through,
        }
    }
}

/// `T(x_0 ⊗ … ⊗ x_n)` for elements of `M_N(A)`; `unit_first` puts the
/// adjoined unit in slot 0 instead of `x_0`.
pub fn trace_of_tensor<S: Scalar>(d: usize, nn: usize, xs: &[&SparseVec<S>], unit_first: bool) -> SparseVec<S> {
    let split = |x: usize| ((x / d) / nn, (x / d) % nn, x % d);
    // (start row, current column, partial flat index) → coefficient
    let mut states: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
    let rest = if unit_first {
        for p in 0..nn {
            states.insert((p, p, d), S::one());
        }
        xs
    } else {
        let (x0, rest) = xs.split_first().expect("at least one factor");
        for (i, c) in x0.iter() {
            let (p, q, a) = split(i);
            let e = states.entry((p, q, a)).or_insert_with(S::zero);
            e.add_assign(c);
        }
        rest
    };
    for x in rest {
        let mut next: BTreeMap<(usize, usize, usize), S> = BTreeMap::new();
        for (&(p0, q, idx), c) in &states {
            for (i, v) in x.iter() {
                let (p, q2, a) = split(i);
                if p != q {
                    continue;
                }
                let e = next.entry((p0, q2, idx * d + a)).or_insert_with(S::zero);
                e.add_assign(&c.mul(v));
            }
        }
        next.retain(|_, c| !c.is_zero());
        states = next;
    }
    let mut out: BTreeMap<usize, S> = BTreeMap::new();
    for ((p0, q, idx), c) in states {
        if p0 == q {
            out.entry(idx).or_insert_with(S::zero).add_assign(&c);
        }
    }
    SparseVec::from_pairs(out.into_iter().collect())
}

fn product_range<S: Scalar>(lo: usize, hi: usize) -> S {
    (lo..=hi).fold(S::one(), |acc, k| acc.mul(&S::from_i64(k as i64)))
}

/// Verifies `(b+B)ω = 0` in every target degree below `cutoff`.
fn closedness<S: ChernScalar>(
    ops: &Operators<S>,
    chain: &ChainVector<S>,
    parity: Parity,
    cutoff: usize,
) -> Result<(Option<usize>, BTreeMap<usize, f64>), ChernError> {
    let mut residuals = BTreeMap::new();
    let mut checked = None;
    let scale = chain.components().values().map(|v| v.max_abs()).fold(1.0, f64::max);
    let first = if parity == Parity::Even { 1 } else { 0 };
    // target degree m receives b from C_{m+1} and B from C_{m−1}
    for m in (first..=cutoff + 1).step_by(2) {
        let mut r = SparseVec::new();
        if m < cutoff {
            r = ops.b(m + 1).mul_vec(&chain.component(m + 1));
        }
        if m >= 1 {
            r = r.add(&ops.connes(m - 1).mul_vec(&chain.component(m - 1)));
        }
        let res = r.max_abs();
        residuals.insert(m, res);
        if m < cutoff {
            if res > S::TOL * scale {
                return Err(ChernError::NotClosed { degree: m, residual: res });
            }
            checked = Some(m);
        }
    }
    Ok((checked, residuals))
}

/// `ch P` for an idempotent `P ∈ M_N(A)`, given in the basis `E_pq ⊗ a`.
pub fn chern_idempotent<S: ChernScalar>(
    alg: &FiniteAlgebra<S>,
    nn: usize,
    p: &SparseVec<S>,
    cutoff: usize,
) -> Result<PeriodicChain<S>, ChernError> {
    if cutoff % 2 != 0 {
        return Err(ChernError::Cutoff { cutoff, parity: Parity::Even });
    }
    let m = alg.matrix_algebra(nn);
    let res = m.mul_sparse(p, p).sub(p).max_abs();
    if res > S::TOL * (1.0 + p.max_abs()) {
        return Err(ChernError::NotIdempotent(res));
    }
    let d = alg.dim();
    let mut chain = ChainVector::zero(d);
    chain.set(0, trace_of_tensor(d, nn, &[p], false));
    for n in 1..=cutoff / 2 {
        let coef = product_range::<S>(n + 1, 2 * n).signed(n % 2 == 1);
        let ps = vec![p; 2 * n + 1];
        let full = trace_of_tensor(d, nn, &ps, false);
        let half = S::one().div(&S::from_i64(2));
        let with_e = trace_of_tensor(d, nn, &ps[..2 * n], true);
        chain.set(2 * n, full.axpy(&half.neg(), &with_e).scale(&coef));
    }
    let ops = Operators::new(alg.clone());
    let (checked, residuals) = closedness(&ops, &chain, Parity::Even, cutoff)?;
    Ok(PeriodicChain { chain, parity: Parity::Even, cutoff, closedness_checked_through: checked, residuals })
}

/// `d/dt ch P_t` given `P` and `Ṗ` at one parameter value, by Leibniz over
/// the tensor slots. The generalized trace does not use the product of `A`,
/// so only `Ṗ` enters.
pub fn chern_idempotent_derivative<S: ChernScalar>(
    d: usize,
    nn: usize,
    p: &SparseVec<S>,
    p_dot: &SparseVec<S>,
    cutoff: usize,
) -> ChainVector<S> {
    let half = S::one().div(&S::from_i64(2));
    let mut chain = ChainVector::zero(d);
    chain.set(0, trace_of_tensor(d, nn, &[p_dot], false));
    for n in 1..=cutoff / 2 {
        let coef = product_range::<S>(n + 1, 2 * n).signed(n % 2 == 1);
        let mut acc = SparseVec::new();
        for slot in 0..=2 * n {
            let xs: Vec<&SparseVec<S>> = (0..=2 * n).map(|i| if i == slot { p_dot } else { p }).collect();
            acc = acc.add(&trace_of_tensor(d, nn, &xs, false));
            if slot < 2 * n {
                acc = acc.axpy(&half.neg(), &trace_of_tensor(d, nn, &xs[..2 * n], true));
            }
        }
        chain.set(2 * n, acc.scale(&coef));
    }
    chain
}

/// Chains with the unit of `A` in some slot past the first.
fn degenerate_span<S: Scalar>(alg: &FiniteAlgebra<S>, m: usize) -> Option<SparseMat<S>> {
    let unit = SparseVec::from_dense(alg.unit()?);
    let d = alg.dim();
    let inner = chain_space_dim(d, m as isize - 1);
    let mut cols = Vec::new();
    for pos in 1..=m {
        let tail = d.pow((m - pos) as u32);
        for idx in 0..inner {
            // split idx into the slots before and after the insertion point
            let (head, rest) = (idx / tail, idx % tail);
            let pairs = unit.iter().map(|(a, c)| ((head * d + a) * tail + rest, c.clone())).collect();
            cols.push(SparseVec::from_pairs(pairs));
        }
    }
    Some(SparseMat::from_columns(chain_space_dim(d, m as isize), cols))
}

/// A degenerate chain `c ∈ C_m` with `b c = r`.
///
/// The invertible formula is closed only modulo chains containing the unit
/// of `A`, so each odd degree gets this correction on top.
fn degenerate_correction<S: ChernScalar>(ops: &Operators<S>, m: usize, r: &SparseVec<S>) -> Result<SparseVec<S>, ChernError> {
    let not_closed = || ChernError::NotClosed { degree: m - 1, residual: r.max_abs() };
    let span = degenerate_span(ops.algebra(), m).ok_or_else(not_closed)?;
    let x = solve(&ops.b(m).matmul(&span), r).ok_or_else(not_closed)?;
    Ok(span.mul_vec(&x))
}

/// Two-sided inverse in `M_N(A)` by an exact solve against left multiplication.
pub fn matrix_inverse<S: ChernScalar>(m: &FiniteAlgebra<S>, u: &SparseVec<S>) -> Result<SparseVec<S>, ChernError> {
    let unit = m.unit().ok_or_else(|| ChernError::NotInvertible("algebra has no unit".into()))?;
    let one = SparseVec::from_dense(unit);
    let big = m.dim();
    let cols = (0..big).map(|j| m.mul_sparse(u, &SparseVec::unit(j))).collect();
    let lu = SparseMat::from_columns(big, cols);
    let inv = solve(&lu, &one).ok_or_else(|| ChernError::NotInvertible("U·X = 1 has no solution".into()))?;
    let tol = S::TOL * (1.0 + u.max_abs() * inv.max_abs());
    for r in [m.mul_sparse(u, &inv).sub(&one), m.mul_sparse(&inv, u).sub(&one)] {
        if r.max_abs() > tol {
            return Err(ChernError::NotInvertible(format!("inverse residual {}", r.max_abs())));
        }
    }
    Ok(inv)
}

/// `ch U` for an invertible `U ∈ M_N(A)`; `cutoff` is odd.
pub fn chern_invertible<S: ChernScalar>(
    alg: &FiniteAlgebra<S>,
    nn: usize,
    u: &SparseVec<S>,
    cutoff: usize,
) -> Result<PeriodicChain<S>, ChernError> {
    if cutoff % 2 != 1 {
        return Err(ChernError::Cutoff { cutoff, parity: Parity::Odd });
    }
    let m = alg.matrix_algebra(nn);
    let inv = matrix_inverse(&m, u)?;
    let d = alg.dim();
    let ops = Operators::new(alg.clone());
    let mut chain = ChainVector::zero(d);
    for n in 0..=(cutoff - 1) / 2 {
        let coef = product_range::<S>(1, n).signed(n % 2 == 1);
        let xs: Vec<&SparseVec<S>> = (0..2 * n + 2).map(|i| if i % 2 == 0 { &inv } else { u }).collect();
        let mut w = trace_of_tensor(d, nn, &xs, false).scale(&coef);
        if n > 0 {
            let deg = 2 * n + 1;
            let r = ops.b(deg).mul_vec(&w).add(&ops.connes(deg - 2).mul_vec(&chain.component(deg - 2)));
            if !r.is_zero() {
                w = w.add(&degenerate_correction(&ops, deg, &r.scale(&S::one().neg()))?);
            }
        }
        chain.set(2 * n + 1, w);
    }
    let (checked, residuals) = closedness(&ops, &chain, Parity::Odd, cutoff)?;
    Ok(PeriodicChain { chain, parity: Parity::Odd, cutoff, closedness_checked_through: checked, residuals })
}

/// `Σ_n φ_n(ω_n)`; every functional must have the chain's parity.
pub fn pair<S: Scalar>(phi: &[DualFunctional<S>], omega: &PeriodicChain<S>) -> Result<S, ChernError> {
    let mut total = S::zero();
    for f in phi {
        let ok = match omega.parity {
            Parity::Even => f.order % 2 == 0,
            Parity::Odd => f.order % 2 == 1,
            Parity::Mixed => true,
        };
        if !ok {
            return Err(ChernError::ParityMismatch { order: f.order, parity: omega.parity });
        }
        total.add_assign(&f.apply(&omega.chain));
    }
    Ok(total)
}
