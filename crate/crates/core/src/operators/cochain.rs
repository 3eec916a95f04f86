//! Hochschild coboundary and Gerstenhaber bracket on `A`-valued cochains.

use crate::algebra::FiniteAlgebra;
use crate::chains::Cochain;
use crate::exactnum::{Scalar, SparseVec};

/// The coboundary with the sign pattern
///
/// `δD(a_1..a_{k+1}) = D(a_1..a_k) a_{k+1} + (−1)^{k+1} a_1 D(a_2..a_{k+1})
///   + Σ_{j=1}^{k} (−1)^{k−j+1} D(a_1, .., a_j a_{j+1}, .., a_{k+1})`,
///
/// so that `δ(id) = m` and `δm = 0` for associative `m`.
pub fn cochain_delta<S: Scalar>(alg: &FiniteAlgebra<S>, dc: &Cochain<S>) -> Cochain<S> {
    let k = dc.order();
    let d = alg.dim();
    Cochain::from_fn(d, k + 1, |a| {
        let unit = |i: usize| SparseVec::unit(a[i]);
        let mut out = SparseVec::new();
        let head = dc.eval_multi(alg, &(0..k).map(unit).collect::<Vec<_>>());
        out = out.add(&alg.mul_sparse(&head, &unit(k)));
        let tail = dc.eval_multi(alg, &(1..=k).map(unit).collect::<Vec<_>>());
        out = out.axpy(&S::one().signed(k % 2 == 0), &alg.mul_sparse(&unit(0), &tail));
        for j in 1..=k {
            let mut args: Vec<SparseVec<S>> = Vec::with_capacity(k);
            for i in 0..j - 1 {
                args.push(unit(i));
            }
            args.push(alg.basis_product(a[j - 1], a[j]).clone());
            for i in j + 1..=k {
                args.push(unit(i));
            }
            let v = dc.eval_multi(alg, &args);
            out = out.axpy(&S::one().signed((k - j + 1) % 2 == 1), &v);
        }
        out
    })
}

/// `(D∘E)(a_1..) = Σ_{i=0}^{k−1} (−1)^{i(l−1)} D(a_1..a_i, E(a_{i+1}..a_{i+l}), ..)`.
pub fn circle<S: Scalar>(alg: &FiniteAlgebra<S>, dc: &Cochain<S>, ec: &Cochain<S>) -> Cochain<S> {
    let (k, l) = (dc.order(), ec.order());
    assert!(k >= 1, "circle product needs order ≥ 1 on the left");
    Cochain::from_fn(alg.dim(), k + l - 1, |a| {
        let mut out = SparseVec::new();
        for i in 0..k {
            let inner = ec.eval_multi(alg, &a[i..i + l].iter().map(|&x| SparseVec::unit(x)).collect::<Vec<_>>());
            if inner.is_zero() {
                continue;
            }
            let mut args: Vec<SparseVec<S>> = a[..i].iter().map(|&x| SparseVec::unit(x)).collect();
            args.push(inner);
            args.extend(a[i + l..].iter().map(|&x| SparseVec::unit(x)));
            let v = dc.eval_multi(alg, &args);
            out = out.axpy(&S::one().signed(i * (l + 1) % 2 == 1), &v);
        }
        out
    })
}

/// `[D, E] = D∘E − (−1)^{(k−1)(l−1)} E∘D`.
pub fn gerstenhaber_bracket<S: Scalar>(alg: &FiniteAlgebra<S>, dc: &Cochain<S>, ec: &Cochain<S>) -> Cochain<S> {
    let (k, l) = (dc.order(), ec.order());
    let de = circle(alg, dc, ec);
    let ed = circle(alg, ec, dc);
    let odd = (k + 1) * (l + 1) % 2 == 1;
    de.axpy_cochain(&S::one().signed(!odd), &ed)
}

impl<S: Scalar> Cochain<S> {
    fn axpy_cochain(&self, c: &S, other: &Cochain<S>) -> Cochain<S> {
        self.add(&other.scale(c))
    }
}
