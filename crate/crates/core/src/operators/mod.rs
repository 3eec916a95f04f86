//! Operator calculus on Hochschild chains: `b`, `B`, `L_D`, `ι_D`, `S_D`,
//! the cochain operations `δ` and `[·,·]`, and the generalized trace.

mod cochain;
pub(crate) mod elementary;
pub mod identities;
mod trace;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

pub use cochain::{circle, cochain_delta, gerstenhaber_bracket};
pub use trace::{generalized_trace, trace_chain};

use crate::algebra::FiniteAlgebra;
use crate::chains::{chain_space_dim, decode_into, stacked_offsets, ChainVector, Cochain};
use crate::exactnum::{Acc, Rational, Scalar, SparseMat, SparseVec};
use elementary::Elementary;

/// A matrix between two chain degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeOperator<S = Rational> {
    pub source: usize,
    pub target: isize,
    pub matrix: SparseMat<S>,
}

/// Which operator to assemble. Cochain-dependent kinds borrow the cochain.
#[derive(Debug)]
pub enum OpKind<'a, S> {
    B,
    Connes,
    Lie(&'a Cochain<S>),
    Iota(&'a Cochain<S>),
    S(&'a Cochain<S>),
}

impl<S> Clone for OpKind<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for OpKind<'_, S> {}

impl<S: Scalar> OpKind<'_, S> {
    /// Change of chain degree.
    pub fn shift(&self) -> isize {
        match self {
            OpKind::B => -1,
            OpKind::Connes => 1,
            OpKind::Lie(c) => 1 - c.order() as isize,
            OpKind::Iota(c) => -(c.order() as isize),
            OpKind::S(c) => 2 - c.order() as isize,
        }
    }

    fn key(&self) -> (u8, u64) {
        match self {
            OpKind::B => (0, 0),
            OpKind::Connes => (1, 0),
            OpKind::Lie(c) => (2, c.fingerprint()),
            OpKind::Iota(c) => (3, c.fingerprint()),
            OpKind::S(c) => (4, c.fingerprint()),
        }
    }
}

const PARALLEL_THRESHOLD: usize = 4096;

/// Assembles an operator column by column from its action on basis tensors.
pub fn assemble<S: Scalar>(
    alg: &FiniteAlgebra<S>,
    kind: OpKind<'_, S>,
    n: usize,
) -> SparseMat<S> {
    let d = alg.dim();
    let src = chain_space_dim(d, n as isize);
    let tgt_deg = n as isize + kind.shift();
    let tgt = chain_space_dim(d, tgt_deg);
    if tgt == 0 || (matches!(kind, OpKind::B) && n == 0) {
        return SparseMat::zeros(tgt, src);
    }
    if let OpKind::Lie(c) | OpKind::Iota(c) | OpKind::S(c) = kind {
        assert!(c.order() >= 1, "order-0 cochains do not act on A_+ ⊗ A^n");
        assert_eq!(c.dim(), d, "cochain belongs to another algebra");
    }
    let el = Elementary { alg };
    let column = |idx: usize, t: &mut Vec<usize>, acc: &mut Acc<S>| -> SparseVec<S> {
        decode_into(d, idx, t);
        match kind {
            OpKind::B => el.b(t, acc),
            OpKind::Connes => el.connes_b(t, acc),
            OpKind::Lie(c) => el.lie(c, t, acc),
            OpKind::Iota(c) => el.iota(c, t, acc),
            OpKind::S(c) => el.cyclic_s(c, t, acc),
        }
        let v = acc.finish();
        debug_assert!(v.max_index().is_none_or(|m| m < tgt));
        v
    };
    let cols: Vec<SparseVec<S>> = if src >= PARALLEL_THRESHOLD {
        (0..src)
            .into_par_iter()
            .map_init(|| (vec![0; n + 1], Acc::new()), |(t, acc), idx| column(idx, t, acc))
            .collect()
    } else {
        let mut t = vec![0; n + 1];
        let mut acc = Acc::new();
        (0..src).map(|idx| column(idx, &mut t, &mut acc)).collect()
    };
    SparseMat::from_columns(tgt, cols)
}

type CacheKey = (u8, u64, usize);

/// Operator factory for one algebra with a thread-safe memo table.
///
/// The table is keyed by operator kind, cochain fingerprint and source
/// degree. Concurrent misses on the same key may assemble twice; the first
/// published matrix wins and later readers see that one.
pub struct Operators<S: Scalar = Rational> {
    alg: FiniteAlgebra<S>,
    cache: Mutex<HashMap<CacheKey, Arc<SparseMat<S>>>>,
}

impl<S: Scalar> Operators<S> {
    pub fn new(alg: FiniteAlgebra<S>) -> Self {
        Operators { alg, cache: Mutex::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> &FiniteAlgebra<S> {
        &self.alg
    }

    pub fn dim(&self, n: isize) -> usize {
        chain_space_dim(self.alg.dim(), n)
    }

    pub fn matrix(&self, kind: OpKind<'_, S>, n: usize) -> Arc<SparseMat<S>> {
        let (tag, fp) = kind.key();
        let key = (tag, fp, n);
        if let Some(m) = self.cache.lock().unwrap().get(&key) {
            return m.clone();
        }
        let m = Arc::new(assemble(&self.alg, kind, n));
        self.cache.lock().unwrap().entry(key).or_insert(m).clone()
    }

    pub fn degree_op(&self, kind: OpKind<'_, S>, n: usize) -> DegreeOperator<S> {
        DegreeOperator { source: n, target: n as isize + kind.shift(), matrix: (*self.matrix(kind, n)).clone() }
    }

    pub fn b(&self, n: usize) -> Arc<SparseMat<S>> {
        self.matrix(OpKind::B, n)
    }

    pub fn connes(&self, n: usize) -> Arc<SparseMat<S>> {
        self.matrix(OpKind::Connes, n)
    }

    /// Composite `ops[0] ∘ ops[1] ∘ …` on `C_n`; the last entry acts first.
    /// Passing through a negative degree gives the zero map.
    pub fn compose(&self, ops: &[OpKind<'_, S>], n: usize) -> SparseMat<S> {
        let total: isize = ops.iter().map(|k| k.shift()).sum();
        let out_dim = self.dim(n as isize + total);
        let mut deg = n as isize;
        let mut acc: Option<SparseMat<S>> = None;
        for kind in ops.iter().rev() {
            if deg < 0 {
                return SparseMat::zeros(out_dim, self.dim(n as isize));
            }
            let m = self.matrix(*kind, deg as usize);
            acc = Some(match acc {
                None => (*m).clone(),
                Some(a) => m.matmul(&a),
            });
            deg += kind.shift();
        }
        match acc {
            Some(a) if deg >= 0 => a,
            _ => SparseMat::zeros(out_dim, self.dim(n as isize)),
        }
    }

    /// Applies an operator to every component of a chain.
    pub fn apply(&self, kind: OpKind<'_, S>, w: &ChainVector<S>) -> ChainVector<S> {
        let mut out = ChainVector::zero(self.alg.dim());
        for (&n, v) in w.components() {
            let tgt = n as isize + kind.shift();
            if tgt < 0 {
                continue;
            }
            let img = self.matrix(kind, n).mul_vec(v);
            let sum = out.component(tgt as usize).add(&img);
            out.set(tgt as usize, sum);
        }
        out
    }

    /// `(b + B) w`
    pub fn total_boundary(&self, w: &ChainVector<S>) -> ChainVector<S> {
        self.apply(OpKind::B, w).add(&self.apply(OpKind::Connes, w))
    }

    /// `Σ kinds` on `⊕_{k≤top} C_k` in stacked coordinates; pieces leaving
    /// the window are dropped.
    pub fn stacked(&self, kinds: &[OpKind<'_, S>], top: usize) -> SparseMat<S> {
        let d = self.alg.dim();
        let offs = stacked_offsets(d, top);
        let total = offs[top + 1];
        let mut cols: Vec<Vec<(usize, S)>> = vec![Vec::new(); total];
        for n in 0..=top {
            for kind in kinds {
                let tgt = n as isize + kind.shift();
                if tgt < 0 || tgt > top as isize {
                    continue;
                }
                let m = self.matrix(*kind, n);
                for (j, c) in m.columns().iter().enumerate() {
                    cols[offs[n] + j].extend(c.iter().map(|(i, x)| (offs[tgt as usize] + i, x.clone())));
                }
            }
        }
        SparseMat::from_columns(total, cols.into_iter().map(SparseVec::from_pairs).collect())
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

pub fn hochschild_b<S: Scalar>(alg: &FiniteAlgebra<S>, n: usize) -> DegreeOperator<S> {
    DegreeOperator { source: n, target: n as isize - 1, matrix: assemble(alg, OpKind::B, n) }
}

pub fn connes_b<S: Scalar>(alg: &FiniteAlgebra<S>, n: usize) -> DegreeOperator<S> {
    DegreeOperator { source: n, target: n as isize + 1, matrix: assemble(alg, OpKind::Connes, n) }
}

pub fn lie_derivative<S: Scalar>(alg: &FiniteAlgebra<S>, dc: &Cochain<S>, n: usize) -> DegreeOperator<S> {
    let kind = OpKind::Lie(dc);
    DegreeOperator { source: n, target: n as isize + kind.shift(), matrix: assemble(alg, kind, n) }
}

pub fn contraction_iota<S: Scalar>(alg: &FiniteAlgebra<S>, dc: &Cochain<S>, n: usize) -> DegreeOperator<S> {
    let kind = OpKind::Iota(dc);
    DegreeOperator { source: n, target: n as isize + kind.shift(), matrix: assemble(alg, kind, n) }
}

/// `S_D` together with `ι_D`; `I_D = ι_D + S_D` has these two components.
pub struct CyclicContraction<S> {
    pub s: DegreeOperator<S>,
    pub iota: DegreeOperator<S>,
}

pub fn cyclic_contraction<S: Scalar>(alg: &FiniteAlgebra<S>, dc: &Cochain<S>, n: usize) -> CyclicContraction<S> {
    let s = OpKind::S(dc);
    CyclicContraction {
        s: DegreeOperator { source: n, target: n as isize + s.shift(), matrix: assemble(alg, s, n) },
        iota: contraction_iota(alg, dc, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::examples::*;
    use crate::chains::{encode, random_cochain};

    fn q(n: i64) -> Rational {
        Rational::integer(n)
    }

    #[test]
    fn b_vanishes_on_commutative_degree_one() {
        for a in [complex(), dual_numbers(), c_plus_c()] {
            assert!(hochschild_b(&a, 1).matrix.is_zero());
        }
    }

    #[test]
    fn b_of_matrix_units() {
        let a = m2c();
        let (e11, e12) = (a.basis_index("E11").unwrap(), a.basis_index("E12").unwrap());
        let b = hochschild_b(&a, 1).matrix;
        let col = b.col(encode(4, 1, &[e11, e12]).unwrap());
        assert_eq!(col, &SparseVec::unit(e12));
        // e ⊗ a goes to a − a
        assert!(b.col(encode(4, 1, &[4, e12]).unwrap()).is_zero());
    }

    #[test]
    fn connes_examples() {
        let a = dual_numbers();
        let b0 = connes_b(&a, 0).matrix;
        assert_eq!(b0.col(1), &SparseVec::unit(encode(2, 1, &[2, 1]).unwrap()));
        let b1 = connes_b(&a, 1).matrix;
        assert!(b1.col(encode(2, 1, &[2, 1]).unwrap()).is_zero());
        assert!(b1.col(encode(2, 1, &[1, 1]).unwrap()).is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let a = dual_numbers();
        // grading derivation x ↦ x
        let grading = Cochain::from_fn(2, 1, |t| if t[0] == 1 { SparseVec::unit(1) } else { SparseVec::new() });
        let l = lie_derivative(&a, &grading, 1).matrix;
        let xx = encode(2, 1, &[1, 1]).unwrap();
        assert_eq!(l.col(xx), &SparseVec::from_pairs(vec![(xx, q(2))]));
        // order 1: D(a0)⊗a1 + a0⊗D(a1)
        let dc = random_cochain(&a, 1, 3);
        let l = lie_derivative(&a, &dc, 1).matrix;
        for a0 in 0..2 {
            for a1 in 0..2 {
                let mut want = Vec::new();
                for (j, c) in dc.values()[a0].iter() {
                    want.push((encode(2, 1, &[j, a1]).unwrap(), c.clone()));
                }
                for (j, c) in dc.values()[a1].iter() {
                    want.push((encode(2, 1, &[a0, j]).unwrap(), c.clone()));
                }
                assert_eq!(l.col(encode(2, 1, &[a0, a1]).unwrap()), &SparseVec::from_pairs(want));
            }
        }
    }

    #[test]
    fn iota_examples() {
        let a = upper_triangular();
        let m = Cochain::multiplication(&a);
        let io = contraction_iota(&a, &m, 2).matrix;
        // ι_m(a0⊗a1⊗a2) = −a0 a1 a2 with E11·E12·E22 = E12
        let col = io.col(encode(3, 2, &[0, 2, 1]).unwrap());
        assert_eq!(col, &SparseVec::from_pairs(vec![(2, q(-1))]));
        assert!(contraction_iota(&a, &m, 1).matrix.is_zero());
        let dc = random_cochain(&a, 1, 1);
        let io = contraction_iota(&a, &dc, 1).matrix;
        let col = io.col(encode(3, 1, &[3, 0]).unwrap());
        assert_eq!(col, &dc.values()[0]);
    }

    #[test]
    fn s_examples() {
        let a = dual_numbers();
        let dc = random_cochain(&a, 2, 0);
        let s = cyclic_contraction(&a, &dc, 2).s.matrix;
        for a1 in 0..2 {
            for a2 in 0..2 {
                assert!(s.col(encode(2, 2, &[2, a1, a2]).unwrap()).is_zero());
            }
        }
        assert!(cyclic_contraction(&a, &random_cochain(&a, 3, 0), 1).s.matrix.is_zero());
    }

    #[test]
    fn cache_reuses_matrices() {
        let ops = Operators::new(dual_numbers());
        let m1 = ops.b(3);
        let m2 = ops.b(3);
        assert!(Arc::ptr_eq(&m1, &m2));
        assert_eq!(ops.cache_len(), 1);
    }
}
