use crate::algebra::FiniteAlgebra;
use crate::chains::{chain_space_dim, decode_into, ChainVector};
use crate::exactnum::{Acc, Scalar, SparseMat, SparseVec};

/// Image of one basis tensor of `C_n(M_N(A))` under the generalized trace.
///
/// The adjoined unit of `M_N(A)_+` is read as `id_N ⊗ e`, so only the matrix
/// units after it have to close up into a cycle.
fn trace_tensor(d: usize, big: usize, nn: usize, t: &[usize]) -> Option<usize> {
    let split = |x: usize| -> (usize, usize, usize) {
        let a = x % d;
        let u = x / d;
        (u / nn, u % nn, a)
    };
    let n = t.len() - 1;
    let mut out = Vec::with_capacity(n + 1);
    let start = usize::from(t[0] == big);
    if start == 1 {
        out.push(d);
    }
    // matrix parts must chain p_j → q_j = p_{j+1}, closing up cyclically
    let parts: Vec<(usize, usize, usize)> = t[start..].iter().map(|&x| split(x)).collect();
    if parts.is_empty() {
        return None;
    }
    for w in 0..parts.len() {
        let next = (w + 1) % parts.len();
        if parts[w].1 != parts[next].0 {
            return None;
        }
    }
    out.extend(parts.iter().map(|p| p.2));
    Some(out[1..].iter().fold(out[0], |acc, &i| acc * d + i))
}

/// Matrix of `T: C_n(M_N(A)) → C_n(A)`.
pub fn generalized_trace<S: Scalar>(alg: &FiniteAlgebra<S>, nn: usize, n: usize) -> SparseMat<S> {
    let d = alg.dim();
    let big = nn * nn * d;
    let src = chain_space_dim(big, n as isize);
    let tgt = chain_space_dim(d, n as isize);
    let mut t = vec![0; n + 1];
    let mut acc = Acc::new();
    let cols = (0..src)
        .map(|idx| {
            decode_into(big, idx, &mut t);
            if let Some(j) = trace_tensor(d, big, nn, &t) {
                acc.push(j, S::one());
            }
            acc.finish()
        })
        .collect();
    SparseMat::from_columns(tgt, cols)
}

/// `T` applied to a chain of `M_N(A)`.
pub fn trace_chain<S: Scalar>(alg: &FiniteAlgebra<S>, nn: usize, w: &ChainVector<S>) -> ChainVector<S> {
    let d = alg.dim();
    let big = nn * nn * d;
    let mut out = ChainVector::zero(d);
    for (&n, v) in w.components() {
        let mut t = vec![0; n + 1];
        let mut pairs = Vec::new();
        for (idx, x) in v.iter() {
            decode_into(big, idx, &mut t);
            if let Some(j) = trace_tensor(d, big, nn, &t) {
                pairs.push((j, x.clone()));
            }
        }
        out.set(n, SparseVec::from_pairs(pairs));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::examples::*;
    use crate::chains::encode;
    use crate::exactnum::Rational;

    #[test]
    fn size_one_is_identity() {
        let a = dual_numbers();
        for n in 0..4 {
            let t = generalized_trace(&a, 1, n);
            assert_eq!(t, SparseMat::<Rational>::identity(chain_space_dim(2, n as isize)));
        }
    }

    #[test]
    fn matrix_unit_traces() {
        let a = dual_numbers();
        let m = a.matrix_algebra(2);
        let e11_x = m.basis_index("E11.x").unwrap();
        let e11_1 = m.basis_index("E11.1").unwrap();
        let e12_x = m.basis_index("E12.x").unwrap();
        let t = generalized_trace(&a, 2, 1);
        let src = encode(8, 1, &[e11_1, e11_x]).unwrap();
        assert_eq!(t.col(src), &SparseVec::unit(encode(2, 1, &[0, 1]).unwrap()));
        let src = encode(8, 1, &[e11_1, e12_x]).unwrap();
        assert!(t.col(src).is_zero());
    }
}
