//! The vertical part of the Gauss-Manin connection and its chain-map gate.
//!
//! With `∇ = d/dt` the defect cocycle is `E_t = −ṁ_t`, and a section `ω(t)`
//! of the periodic complex is parallel for `∇_GM = d/dt − I_{E_t}` when
//! `ω' = I_{E_t} ω`.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;
use crate::chains::{stacked_offsets, ChainVector, Cochain};
use crate::chern::{chern_idempotent, chern_idempotent_derivative};
use crate::exactnum::{rank_kernel, solve, PolyQ, Rational, Scalar, SparseMat, SparseVec};
use crate::operators::{cochain_delta, cyclic_contraction, CyclicContraction, OpKind, Operators};

use super::{DeformationError, DeformationFamily};

/// `I_{E_t}` at a rational parameter, restricted to source degree `n`.
pub fn gm_vertical(family: &DeformationFamily, t: &Rational, n: usize) -> Result<CyclicContraction<Rational>, DeformationError> {
    let e = family.velocity()?.defect().map(|p| p.eval(t));
    Ok(cyclic_contraction(&family.fiber(t), &e, n))
}

/// `I_{E_t}` with polynomial entries, restricted to source degree `n`.
pub fn gm_vertical_poly(family: &DeformationFamily, n: usize) -> Result<CyclicContraction<PolyQ>, DeformationError> {
    let e = family.velocity()?.defect();
    Ok(cyclic_contraction(family.polynomial_algebra(), &e, n))
}

/// `I_E = ι_E + S_E` on `⊕_{k≤top} C_k`.
pub fn vertical_window<S: Scalar>(ops: &Operators<S>, e: &Cochain<S>, top: usize) -> SparseMat<S> {
    ops.stacked(&[OpKind::Iota(e), OpKind::S(e)], top)
}

/// `b + B` on `⊕_{k≤top} C_k`, with `B` out of `C_top` dropped.
pub fn boundary_window<S: Scalar>(ops: &Operators<S>, top: usize) -> SparseMat<S> {
    ops.stacked(&[OpKind::B, OpKind::Connes], top)
}

/// The polynomial matrix of `I_{E_t}` on the window.
pub fn vertical_window_poly(family: &DeformationFamily, top: usize) -> Result<SparseMat<PolyQ>, DeformationError> {
    let ops = Operators::new(family.polynomial_algebra().clone());
    Ok(vertical_window(&ops, &family.velocity()?.defect(), top))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeResidual {
    pub source_degree: usize,
    pub nonzero_entries: usize,
    /// Highest `t`-degree among the nonzero entries.
    pub max_t_degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainMapReport {
    pub window: usize,
    /// Source degrees whose image stays inside the window.
    pub interior: Vec<DegreeResidual>,
    /// The top source degree, where `B` leaves the window.
    pub boundary: DegreeResidual,
    pub interior_zero: bool,
}

/// `[b_t + B, d/dt − I_{E_t}]` on every basis chain of `⊕_{k≤top} C_k`,
/// exactly over `Q[t]`.
pub fn gm_chain_map_check(family: &DeformationFamily, top: usize) -> Result<ChainMapReport, DeformationError> {
    let gen = vertical_window_poly(family, top)?;
    Ok(generator_chain_map_check(family, &gen, top))
}

/// The chain-map residual `[b_t + B, d/dt − G]` for a connection whose
/// parallel sections solve `ω' = G ω` on the window.
pub fn generator_chain_map_check(family: &DeformationFamily, gen: &SparseMat<PolyQ>, top: usize) -> ChainMapReport {
    let alg: &FiniteAlgebra<PolyQ> = family.polynomial_algebra();
    let ops = Operators::new(alg.clone());
    let d = boundary_window(&ops, top);
    let d_dot = d.map(|p| p.derivative());
    let res = gen.matmul(&d).sub(&d.matmul(gen)).sub(&d_dot);
    let offs = stacked_offsets(alg.dim(), top);
    let per_degree: Vec<DegreeResidual> = (0..=top)
        .map(|k| {
            let cols = &res.columns()[offs[k]..offs[k + 1]];
            DegreeResidual {
                source_degree: k,
                nonzero_entries: cols.iter().map(|c| c.nnz()).sum(),
                max_t_degree: cols.iter().flat_map(|c| c.iter().filter_map(|(_, p)| p.degree())).max(),
            }
        })
        .collect();
    let (interior, boundary) = per_degree.split_at(top);
    let interior_zero = interior.iter().all(|r| r.nonzero_entries == 0);
    ChainMapReport { window: top, interior: interior.to_vec(), boundary: boundary[0].clone(), interior_zero }
}

/// Generator of parallel transport for the connection `d/dt − F`, `F` an
/// order-1 cochain: `ω' = (L_F + I_{E − δF}) ω`.
pub fn gauge_generator(family: &DeformationFamily, f: &Cochain<PolyQ>, top: usize) -> Result<SparseMat<PolyQ>, DeformationError> {
    if f.order() != 1 || f.dim() != family.dim() {
        return Err(DeformationError::PreconditionFailed("F must be an order-1 cochain on the family's space".into()));
    }
    let alg = family.polynomial_algebra();
    let ops = Operators::new(alg.clone());
    let e = family.velocity()?.defect().sub(&cochain_delta(alg, f));
    Ok(ops.stacked(&[OpKind::Lie(f)], top).add(&vertical_window(&ops, &e, top)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelDefect {
    pub t: Rational,
    pub window: usize,
    /// Max-abs of `d/dt ch P − I_E ch P` on the window.
    pub defect_norm: f64,
    /// Whether the defect is `(b+B)β` with `β ∈ ⊕_{k≤top+1} C_k` odd.
    pub is_boundary: bool,
}

/// `∇_GM ch P_t` at one parameter value, exactly, and whether it is a
/// boundary in the window. `ch` is built through `top + 2` so that `ι_E`
/// from above fills the top degree.
pub fn chern_parallel_defect(
    family: &DeformationFamily,
    t: &Rational,
    nn: usize,
    p: &SparseVec<Rational>,
    p_dot: &SparseVec<Rational>,
    top: usize,
) -> Result<ParallelDefect, DeformationError> {
    if top % 2 != 0 {
        return Err(DeformationError::PreconditionFailed(format!("window top {top} is odd")));
    }
    let a = family.fiber(t);
    let d = a.dim();
    let ch = chern_idempotent(&a, nn, p, top + 2).map_err(|e| DeformationError::PreconditionFailed(e.to_string()))?;
    let ch_dot = chern_idempotent_derivative(d, nn, p, p_dot, top + 2);
    let e = family.velocity()?.defect().map(|c| c.eval(t));
    let ops = Operators::new(a);
    let big = top + 2;
    let v = vertical_window(&ops, &e, big).mul_vec(&ch.chain.to_stacked(big));
    let defect = ChainVector::from_stacked(d, big, &ch_dot.to_stacked(big).sub(&v)).truncate(top);
    Ok(ParallelDefect {
        t: t.clone(),
        window: top,
        defect_norm: defect.components().values().map(|c| c.max_abs()).fold(0.0, f64::max),
        is_boundary: is_window_boundary(&ops, top, &defect),
    })
}

/// Whether `v`, supported in degrees `≤ top`, equals `(b+B)β` in those
/// degrees for some `β ∈ ⊕_{k≤top+1} C_k`.
pub fn is_window_boundary(ops: &Operators<Rational>, top: usize, v: &ChainVector<Rational>) -> bool {
    let d = ops.algebra().dim();
    let offs = stacked_offsets(d, top + 1);
    let dmat = boundary_window(ops, top + 1).select_rows(&(0..offs[top + 1]).collect::<Vec<_>>());
    solve(&dmat, &v.truncate(top).to_stacked(top)).is_some()
}

/// Exact basis of the functionals on `⊕_{k≤top} C_k` that vanish on every
/// window boundary; `v` is a boundary iff all of them vanish on it.
pub fn window_cocycles(ops: &Operators<Rational>, top: usize) -> Vec<SparseVec<Rational>> {
    let offs = stacked_offsets(ops.algebra().dim(), top + 1);
    let dmat = boundary_window(ops, top + 1).select_rows(&(0..offs[top + 1]).collect::<Vec<_>>());
    rank_kernel(&dmat.transpose()).1
}
