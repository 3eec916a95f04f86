//! Khalkhali's contraction and the finite retract `C_0^per(A)` on the cochain side.
//!
//! Cochains `C^k` are identified with functionals on `C_k`, so `b^T` raises
//! the degree, `B^T` lowers it, and `h = α^T: C^{k+1} → C^k`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::chains::stacked_offsets;
use crate::deformation::boundary_window;
use crate::exactnum::{rank, rank_kernel, rref, Rational, Scalar, SparseMat, SparseVec};
use crate::operators::Operators;

use super::universal::{alpha_matrix, CoboundingCochain};
use super::RetractError;

/// `α_k: C_k → C_{k+1}` for `n ≤ k ≤ top`, with `bα + αb = 1` checked on `n+1..=top`.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub n: usize,
    pub top: usize,
    alphas: BTreeMap<usize, SparseMat<Rational>>,
}

impl Contraction {
    pub fn chain(&self, k: usize) -> &SparseMat<Rational> {
        &self.alphas[&k]
    }

    /// `h = α_k^T: C^{k+1} → C^k`.
    pub fn cochain(&self, k: usize) -> SparseMat<Rational> {
        self.alphas[&k].transpose()
    }

    pub fn checked_degrees(&self) -> std::ops::RangeInclusive<usize> {
        self.n + 1..=self.top
    }
}

/// Builds `α_k` for `k ∈ [n, top]` and verifies `b_{k+1}α_k + α_{k−1}b_k = 1`
/// for `k ∈ [n+1, top]`. Degrees `≤ n` are left unchecked.
pub fn contraction_alpha(ops: &Operators, phi: &CoboundingCochain, top: usize) -> Result<Contraction, RetractError> {
    let alg = ops.algebra();
    let n = phi.order();
    let alphas: BTreeMap<usize, SparseMat<Rational>> = (n..=top).map(|k| (k, alpha_matrix(alg, phi, k))).collect();
    for k in n + 1..=top {
        let lhs = ops.b(k + 1).matmul(&alphas[&k]).add(&alphas[&(k - 1)].matmul(&ops.b(k)));
        if lhs != SparseMat::identity(ops.dim(k as isize)) {
            return Err(RetractError::HomotopyIdentityFailed(k));
        }
    }
    Ok(Contraction { n, top, alphas })
}

/// `b^T + B^T` on `⊕_{k≤top} C^k`; the part leaving the window is dropped.
pub fn cochain_differential(ops: &Operators, top: usize) -> SparseMat<Rational> {
    boundary_window(ops, top).transpose()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractDims {
    pub even: usize,
    pub odd: usize,
}

/// `C_0^even = ⊕_{k<N} C^{2k} ⊕ ker(b: C^{2N} → C^{2N+1})`, `C_0^odd = ⊕_{k<N} C^{2k+1}`.
///
/// Coordinates: the ambient coordinates of degrees `< 2N`, then one
/// coordinate per free column of `b^T: C^{2N} → C^{2N+1}`.
#[derive(Clone, Debug)]
pub struct RetractComplex {
    pub n: usize,
    pub big_n: usize,
    d: usize,
    /// Ambient offsets through degree `2N + 2`.
    offs: Vec<usize>,
    kernel: Vec<SparseVec<Rational>>,
    free: Vec<usize>,
    inclusion: SparseMat<Rational>,
    retraction_ambient: SparseMat<Rational>,
    differential: SparseMat<Rational>,
}

/// Kernel of `m` with the free column of each basis vector; the vector has
/// `−1` there and `0` at every other free column.
fn kernel_with_free(m: &SparseMat<Rational>) -> (Vec<SparseVec<Rational>>, Vec<usize>) {
    let (rows, pivots) = rref(m);
    let mut is_pivot = vec![false; m.ncols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..m.ncols()).filter(|&f| !is_pivot[f]).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut pairs = vec![(f, Rational::one().neg())];
            pairs.extend(rows.iter().zip(&pivots).map(|(r, &p)| (p, r.get(f))).filter(|(_, x)| !x.is_zero()));
            SparseVec::from_pairs(pairs)
        })
        .collect();
    (basis, free)
}

impl RetractComplex {
    /// The construction without the chain-map and homology checks; used
    /// once per grid point by transport.
    pub(crate) fn assemble(ops: &Operators, phi: &CoboundingCochain, big_n: usize) -> Result<(Self, Contraction), RetractError> {
        let n = phi.order();
        if 2 * big_n <= n + 1 {
            return Err(RetractError::Precondition(format!("need 2N > n + 1, got N = {big_n}, n = {n}")));
        }
        let d = ops.algebra().dim();
        let top = 2 * big_n;
        let m_top = top + 2;
        let offs = stacked_offsets(d, m_top);
        let contraction = contraction_alpha(ops, phi, m_top)?;

        let bt = ops.b(top + 1).transpose();
        let (kernel, free) = kernel_with_free(&bt);
        for (v, &f) in kernel.iter().zip(&free) {
            if !bt.mul_vec(v).is_zero() || free.iter().any(|&g| v.get(g) != if g == f { Rational::one().neg() } else { Rational::zero() }) {
                return Err(RetractError::RankError("kernel basis of b^T on the top degree is inconsistent".into()));
            }
        }
        let low = offs[top];
        let coords = low + kernel.len();
        let amb = offs[top + 1];

        let mut inc_cols: Vec<SparseVec<Rational>> = (0..low).map(SparseVec::unit).collect();
        inc_cols.extend(kernel.iter().map(|v| v.reindex(|i| Some(i + low))));
        let inclusion = SparseMat::from_columns(amb, inc_cols);

        // 1 − IP = δH + Hδ with H = α^T above degree 2N, so the perturbation
        // lemma gives R_amb = P ∘ (1 + B^T H)^{-1} = P ∘ Σ_j (−B^T H)^j
        let h: BTreeMap<usize, SparseMat<Rational>> = (top + 1..=m_top).map(|k| (k, contraction.cochain(k - 1))).collect();
        let bt_conn: BTreeMap<usize, SparseMat<Rational>> = (top - 1..=m_top - 2).map(|k| (k, ops.connes(k).transpose())).collect();
        let proj = SparseMat::identity(ops.dim(top as isize)).sub(&contraction.cochain(top).matmul(&bt));
        let split = |v: &SparseVec<Rational>| -> Vec<SparseVec<Rational>> {
            (0..=m_top).map(|k| v.reindex(|i| (offs[k] <= i && i < offs[k + 1]).then(|| i - offs[k]))).collect()
        };
        let r_cols = (0..offs[m_top + 1])
            .map(|j| {
                let mut g = split(&SparseVec::unit(j));
                for k in (top + 1..=m_top).rev() {
                    if !g[k].is_zero() {
                        let y = bt_conn[&(k - 2)].mul_vec(&h[&k].mul_vec(&g[k]));
                        g[k - 2] = g[k - 2].sub(&y);
                    }
                }
                g[top] = proj.mul_vec(&g[top]);
                let pairs = (0..=top).flat_map(|k| g[k].iter().map(|(i, x)| (offs[k] + i, x.clone())).collect::<Vec<_>>()).collect();
                SparseVec::from_pairs(pairs)
            })
            .collect();
        let retraction_ambient = SparseMat::from_columns(amb, r_cols);

        let mut rc = RetractComplex {
            n,
            big_n,
            d,
            offs,
            kernel,
            free,
            inclusion,
            retraction_ambient,
            differential: SparseMat::zeros(coords, coords),
        };
        rc.differential = rc.to_coords(&cochain_differential(ops, top).matmul(&rc.inclusion));
        Ok((rc, contraction))
    }

    pub fn dim(&self) -> usize {
        self.offs[2 * self.big_n] + self.kernel.len()
    }

    pub fn algebra_dim(&self) -> usize {
        self.d
    }

    /// Offsets of the ambient cochain degrees `0..=2N+2`.
    pub fn ambient_offsets(&self) -> &[usize] {
        &self.offs
    }

    pub fn kernel_basis(&self) -> &[SparseVec<Rational>] {
        &self.kernel
    }

    /// Whether coordinate `i` is odd.
    pub fn is_odd(&self, i: usize) -> bool {
        let top = 2 * self.big_n;
        if i >= self.offs[top] {
            return false;
        }
        (0..top).find(|&k| i < self.offs[k + 1]).unwrap() % 2 == 1
    }

    pub fn dims(&self) -> RetractDims {
        let odd = (0..self.dim()).filter(|&i| self.is_odd(i)).count();
        RetractDims { even: self.dim() - odd, odd }
    }

    /// Ambient columns (degrees `≤ 2N`, top component in the kernel) to coordinates.
    pub fn to_coords(&self, m: &SparseMat<Rational>) -> SparseMat<Rational> {
        let low = self.offs[2 * self.big_n];
        let pos: BTreeMap<usize, usize> = self.free.iter().enumerate().map(|(j, &f)| (low + f, low + j)).collect();
        let cols = m
            .columns()
            .iter()
            .map(|c| SparseVec::from_pairs(c.iter().filter_map(|(i, x)| if i < low { Some((i, x.clone())) } else { pos.get(&i).map(|&p| (p, x.neg())) }).collect()))
            .collect();
        SparseMat::from_columns(self.dim(), cols)
    }

    /// `I`: coordinates to ambient cochains of degree `≤ 2N`.
    pub fn inclusion(&self) -> &SparseMat<Rational> {
        &self.inclusion
    }

    /// `R` on ambient cochains of degree `≤ 2N + 2`, landing in ambient
    /// cochains of degree `≤ 2N`.
    pub fn retraction_ambient(&self) -> &SparseMat<Rational> {
        &self.retraction_ambient
    }

    /// `R` to coordinates.
    pub fn retraction(&self) -> SparseMat<Rational> {
        self.to_coords(&self.retraction_ambient)
    }

    /// `b + B` in coordinates.
    pub fn differential(&self) -> &SparseMat<Rational> {
        &self.differential
    }

    /// Exact homology dimensions of the `Z/2` complex.
    pub fn homology(&self) -> RetractDims {
        let (ev, od): (Vec<usize>, Vec<usize>) = (0..self.dim()).partition(|&i| !self.is_odd(i));
        let r_even = rank(&self.differential.select_columns(&ev));
        let r_odd = rank(&self.differential.select_columns(&od));
        RetractDims { even: ev.len() - r_even - r_odd, odd: od.len() - r_odd - r_even }
    }
}

/// `C_0^per(A)` with `I`, `R` and their checks: `RI = 1`, `R` a chain map
/// on source degrees `≤ 2N+1`, and `IR − 1` sending every cocycle of degree
/// `≤ 2N+1` to a coboundary.
pub fn build_retract(alg: &FiniteAlgebra, phi: &CoboundingCochain, big_n: usize) -> Result<RetractComplex, RetractError> {
    if !phi.verify(alg) {
        return Err(RetractError::Precondition("φ does not solve δφ = d^{⊗(n+1)} on this algebra".into()));
    }
    let ops = Operators::new(alg.clone());
    let (rc, _) = RetractComplex::assemble(&ops, phi, big_n)?;
    let top = 2 * big_n;
    let m_top = top + 2;
    let r = rc.retraction();
    let inc_big = SparseMat::from_columns(rc.offs[m_top + 1], rc.inclusion().columns().to_vec());
    if r.matmul(&inc_big) != SparseMat::identity(rc.dim()) {
        return Err(RetractError::IdentityFailed("R∘I ≠ 1".into()));
    }
    let big = cochain_differential(&ops, m_top);
    let src: Vec<usize> = (0..rc.offs[m_top]).collect();
    let lhs = r.matmul(&big).select_columns(&src);
    let rhs = rc.differential().matmul(&r).select_columns(&src);
    if lhs != rhs {
        return Err(RetractError::IdentityFailed("R is not a chain map".into()));
    }
    // cocycles supported in degrees ≤ 2N+1
    let (_, cocycles) = rank_kernel(&big.select_columns(&src));
    let ir = inc_big.matmul(&r);
    let w: Vec<SparseVec<Rational>> = cocycles.iter().map(|z| ir.mul_vec(z).sub(z)).collect();
    let exact = big.select_columns(&(0..rc.offs[top + 1]).collect::<Vec<_>>());
    let mut cols = exact.columns().to_vec();
    cols.extend(w);
    if rank(&SparseMat::from_columns(exact.nrows(), cols)) != rank(&exact) {
        return Err(RetractError::IdentityFailed("IR is not the identity on cohomology".into()));
    }
    Ok(rc)
}

/// `(dim HP^even, dim HP^odd)` as the cohomology of the retract.
pub fn hp_exact_from_retract(alg: &FiniteAlgebra, phi: &CoboundingCochain, big_n: usize) -> Result<(usize, usize), RetractError> {
    let h = build_retract(alg, phi, big_n)?.homology();
    Ok((h.even, h.odd))
}
