//! The class of `E = −ṁ`: does the family admit a connection that is a
//! derivation, i.e. is `ṁ_t = δ_t F_t` for an order-1 cochain `F_t`?

use crate::algebra::FiniteAlgebra;
use crate::chains::Cochain;
use crate::exactnum::{solve, PolyQ, RatFunc, Rational, Scalar, SparseMat, SparseVec};
use crate::operators::cochain_delta;

use super::{DeformationError, DeformationFamily};

#[derive(Clone, Debug, PartialEq)]
pub enum Obstruction {
    /// `δ_t F_t = ṁ_t` with polynomial `F`.
    Witness(Cochain<PolyQ>),
    /// No `F` exists on the fiber at `t0`.
    Obstructed { t0: Rational },
    /// Solvable over `Q(t)`, no polynomial solution up to `degree_bound`, and
    /// no sampled fiber is obstructed.
    Undecided { degree_bound: usize },
}

/// Columns `δ(F_u)` for the elementary order-1 cochains `F_u: e_i ↦ e_k`,
/// flattened over argument pairs and output coordinates.
fn delta_columns<S: Scalar>(alg: &FiniteAlgebra<S>) -> SparseMat<S> {
    let d = alg.dim();
    let cols = (0..d * d)
        .map(|u| {
            let (i, k) = (u / d, u % d);
            let f = Cochain::from_fn(d, 1, |a| if a[0] == i { SparseVec::unit(k) } else { SparseVec::new() });
            flatten(&cochain_delta(alg, &f))
        })
        .collect();
    SparseMat::from_columns(d * d * d, cols)
}

fn flatten<S: Scalar>(c: &Cochain<S>) -> SparseVec<S> {
    let d = c.dim();
    let pairs = c.values().iter().enumerate().flat_map(|(ij, v)| v.iter().map(move |(k, x)| (ij * d + k, x.clone()))).collect();
    SparseVec::from_pairs(pairs)
}

fn unflatten<S: Scalar>(d: usize, x: &SparseVec<S>) -> Cochain<S> {
    Cochain::from_fn(d, 1, |a| x.reindex(|u| (u / d == a[0]).then_some(u % d)))
}

/// Exact solve of `δ_{t0} F = ṁ_{t0}` on one fiber.
pub fn fiber_witness(family: &DeformationFamily, t0: &Rational) -> Result<Option<Cochain<Rational>>, DeformationError> {
    let a = family.fiber(t0);
    let rhs = flatten(&family.velocity()?.at(t0));
    Ok(solve(&delta_columns(&a), &rhs).map(|x| unflatten(a.dim(), &x)))
}

/// Polynomial solution with every entry of degree at most `bound`.
fn polynomial_witness(family: &DeformationFamily, bound: usize) -> Result<Option<Cochain<PolyQ>>, DeformationError> {
    let d = family.dim();
    let base = delta_columns(family.polynomial_algebra());
    let mdot = flatten(&family.velocity()?.cochain);
    let top = bound + family.max_degree() + 1;
    let rows = base.nrows() * (top + 1);
    // coordinate (entry, power p) sits at entry * (top+1) + p
    let spread = |v: &SparseVec<PolyQ>, shift: usize| -> SparseVec<Rational> {
        let pairs = v
            .iter()
            .flat_map(|(i, p)| p.coeffs().iter().enumerate().map(move |(r, c)| (i * (top + 1) + r + shift, c.clone())).collect::<Vec<_>>())
            .collect();
        SparseVec::from_pairs(pairs)
    };
    let mut cols = Vec::new();
    for u in 0..d * d {
        for r in 0..=bound {
            cols.push(spread(base.col(u), r));
        }
    }
    let m = SparseMat::from_columns(rows, cols);
    let Some(x) = solve(&m, &spread(&mdot, 0)) else { return Ok(None) };
    let mut per: Vec<Vec<Rational>> = vec![vec![Rational::zero(); bound + 1]; d * d];
    for (col, c) in x.iter() {
        per[col / (bound + 1)][col % (bound + 1)] = c.clone();
    }
    let polys: Vec<(usize, PolyQ)> =
        per.into_iter().enumerate().map(|(u, cs)| (u, PolyQ::new(cs).expect("bounded degree"))).filter(|(_, p)| !p.is_zero()).collect();
    Ok(Some(unflatten(d, &SparseVec::from_pairs(polys))))
}

const SAMPLES: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];

/// Decides whether `[E] = 0` through `δ_t F_t = ṁ_t`.
///
/// A polynomial witness is searched up to degree `2(deg m + 1)`. Otherwise
/// the system is solved over `Q(t)`; the roots of the solution's
/// denominators and then a few fixed samples are tried as obstructed fibers.
pub fn triviality_obstruction(family: &DeformationFamily) -> Result<Obstruction, DeformationError> {
    let bound = 2 * (family.max_degree() + 1);
    if let Some(f) = polynomial_witness(family, bound)? {
        return Ok(Obstruction::Witness(f));
    }
    let ra: FiniteAlgebra<RatFunc> = family.polynomial_algebra().map_scalars(|p| RatFunc::from(p.clone()));
    let rhs = flatten(&family.velocity()?.cochain).map(|p| RatFunc::from(p.clone()));
    let mut candidates: Vec<Rational> = Vec::new();
    if let Some(x) = solve(&delta_columns(&ra), &rhs) {
        for (_, f) in x.iter() {
            for r in f.den().rational_roots() {
                if !candidates.contains(&r) {
                    candidates.push(r);
                }
            }
        }
    }
    candidates.extend(SAMPLES.iter().map(|&(p, q)| Rational::new(p, q)));
    for t0 in candidates {
        if fiber_witness(family, &t0)?.is_none() {
            return Ok(Obstruction::Obstructed { t0 });
        }
    }
    Ok(Obstruction::Undecided { degree_bound: bound })
}
