//! Exact matrix identities of the operator calculus, degree by degree.

use super::{cochain_delta, gerstenhaber_bracket, OpKind, Operators};
use crate::chains::Cochain;
use crate::exactnum::{Scalar, SparseMat};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("identity {name} fails on C_{degree} ({nonzero} nonzero entries in the difference)")]
pub struct IdentityFailure {
    pub name: String,
    pub degree: usize,
    pub nonzero: usize,
}

/// Sum of signed composites on `C_n`; all terms must share a total shift.
fn combo<S: Scalar>(ops: &Operators<S>, n: usize, terms: &[(bool, Vec<OpKind<'_, S>>)]) -> SparseMat<S> {
    let mut out: Option<SparseMat<S>> = None;
    for (negative, chain) in terms {
        let m = ops.compose(chain, n);
        let c = S::one().signed(*negative);
        out = Some(match out {
            None => m.scale(&c),
            Some(o) => o.axpy(&c, &m),
        });
    }
    out.expect("at least one term")
}

fn expect_zero<S: Scalar>(m: SparseMat<S>, name: &str, n: usize) -> Result<(), IdentityFailure> {
    if m.is_zero() {
        Ok(())
    } else {
        Err(IdentityFailure { name: name.to_string(), degree: n, nonzero: m.nnz() })
    }
}

/// `b² = 0`, `B² = 0`, `bB + Bb = 0` on `C_n`.
pub fn check_complex<S: Scalar>(ops: &Operators<S>, n: usize) -> Result<(), IdentityFailure> {
    use OpKind::{Connes, B};
    expect_zero(ops.compose(&[B, B], n), "b∘b = 0", n)?;
    expect_zero(ops.compose(&[Connes, Connes], n), "B∘B = 0", n)?;
    expect_zero(combo(ops, n, &[(false, vec![B, Connes]), (false, vec![Connes, B])]), "bB + Bb = 0", n)
}

/// `[b, L_D] = L_{δD}` and `[B, L_D] = 0`, graded by `|L_D| = 1 − k`.
pub fn check_lie_commutators<S: Scalar>(
    ops: &Operators<S>,
    dc: &Cochain<S>,
    n: usize,
) -> Result<(), IdentityFailure> {
    use OpKind::{Connes, Lie, B};
    let k = dc.order();
    let ddc = cochain_delta(ops.algebra(), dc);
    let odd = (k + 1) % 2 == 1; // (−1)^{k−1}
    let lhs = combo(ops, n, &[(false, vec![B, Lie(dc)]), (!odd, vec![Lie(dc), B]), (true, vec![Lie(&ddc)])]);
    expect_zero(lhs, "[b, L_D] = L_δD", n)?;
    let lhs = combo(ops, n, &[(false, vec![Connes, Lie(dc)]), (!odd, vec![Lie(dc), Connes])]);
    expect_zero(lhs, "[B, L_D] = 0", n)
}

/// `[L_D, L_E] = L_{[D,E]}` with sign `(−1)^{(1−k)(1−l)}`.
pub fn check_lie_bracket<S: Scalar>(
    ops: &Operators<S>,
    dc: &Cochain<S>,
    ec: &Cochain<S>,
    n: usize,
) -> Result<(), IdentityFailure> {
    use OpKind::Lie;
    let (k, l) = (dc.order(), ec.order());
    let br = gerstenhaber_bracket(ops.algebra(), dc, ec);
    let odd = (k + 1) * (l + 1) % 2 == 1;
    let lhs = combo(ops, n, &[(false, vec![Lie(dc), Lie(ec)]), (!odd, vec![Lie(ec), Lie(dc)]), (true, vec![Lie(&br)])]);
    expect_zero(lhs, "[L_D, L_E] = L_[D,E]", n)
}

/// `[b, ι_D] = −ι_{δD}` with sign `(−1)^k`.
pub fn check_contraction<S: Scalar>(ops: &Operators<S>, dc: &Cochain<S>, n: usize) -> Result<(), IdentityFailure> {
    use OpKind::{Iota, B};
    let k = dc.order();
    let ddc = cochain_delta(ops.algebra(), dc);
    let odd = k % 2 == 1;
    let lhs = combo(ops, n, &[(false, vec![B, Iota(dc)]), (!odd, vec![Iota(dc), B]), (false, vec![Iota(&ddc)])]);
    expect_zero(lhs, "[b, ι_D] = −ι_δD", n)
}

/// Cartan homotopy formula `[b+B, I_D] = L_D − I_{δD}` on `C_n`, compared
/// in each of the three target degrees `n−k−1`, `n−k+1`, `n−k+3`.
pub fn check_cartan<S: Scalar>(ops: &Operators<S>, dc: &Cochain<S>, n: usize) -> Result<(), IdentityFailure> {
    use OpKind::{Connes, Iota, Lie, B, S as Sd};
    let k = dc.order();
    let ddc = cochain_delta(ops.algebra(), dc);
    let sg = k % 2 == 1; // (−1)^k is −1
    let name = "[b+B, I_D] = L_D − I_δD";
    let low = combo(ops, n, &[(false, vec![B, Iota(dc)]), (!sg, vec![Iota(dc), B]), (false, vec![Iota(&ddc)])]);
    expect_zero(low, name, n)?;
    let mid = combo(
        ops,
        n,
        &[
            (false, vec![Connes, Iota(dc)]),
            (false, vec![B, Sd(dc)]),
            (!sg, vec![Iota(dc), Connes]),
            (!sg, vec![Sd(dc), B]),
            (true, vec![Lie(dc)]),
            (false, vec![Sd(&ddc)]),
        ],
    );
    expect_zero(mid, name, n)?;
    let high = combo(ops, n, &[(false, vec![Connes, Sd(dc)]), (!sg, vec![Sd(dc), Connes])]);
    expect_zero(high, name, n)
}

/// `L_m = b` for the multiplication of `A_+`.
pub fn check_lm_equals_b<S: Scalar>(ops: &Operators<S>, n: usize) -> Result<(), IdentityFailure> {
    let m = Cochain::plus_multiplication(ops.algebra());
    let diff = ops.matrix(OpKind::Lie(&m), n).sub(&ops.b(n));
    expect_zero(diff, "L_m = b", n)
}

/// Every identity above for one pair of cochains on degrees `0..=n_max`.
pub fn check_all<S: Scalar>(
    ops: &Operators<S>,
    dc: &Cochain<S>,
    ec: &Cochain<S>,
    n_max: usize,
) -> Result<(), IdentityFailure> {
    for n in 0..=n_max {
        check_complex(ops, n)?;
        check_lm_equals_b(ops, n)?;
        check_lie_commutators(ops, dc, n)?;
        check_lie_bracket(ops, dc, ec, n)?;
        check_contraction(ops, dc, n)?;
        check_cartan(ops, dc, n)?;
    }
    Ok(())
}
