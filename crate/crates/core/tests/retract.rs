mod common;

use std::collections::HashMap;

use cyclo::algebra::examples::*;
use cyclo::chains::{chain_space_dim, decode, DualFunctional};
use cyclo::chern::chern_idempotent;
use cyclo::deformation::*;
use cyclo::exactnum::{Rational, Scalar, SparseMat, SparseVec};
use cyclo::homology::hp_dims;
use cyclo::retract::*;
use cyclo::{FiniteAlgebra, Operators};
use proptest::prelude::*;

use common::q;

/// Elements of `Ã^{⊗k}` keyed by basis tuples; index `d` is the unit of `Ã`.
type Tensor = HashMap<Vec<usize>, Rational>;

fn add_to(t: &mut Tensor, k: Vec<usize>, c: Rational) {
    let e = t.entry(k).or_insert_with(Rational::zero);
    *e = e.add(&c);
}

fn clean(t: Tensor) -> Tensor {
    t.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// `x·y` in `Ã`, written out without the library's `A_+` table.
fn unital_product(a: &FiniteAlgebra, x: usize, y: usize) -> Vec<(usize, Rational)> {
    let d = a.dim();
    match (x == d, y == d) {
        (true, _) => vec![(y, q(1))],
        (_, true) => vec![(x, q(1))],
        _ => (0..d).map(|k| (k, a.constant(x, y, k).clone())).filter(|(_, c)| !c.is_zero()).collect(),
    }
}

/// `X ↦ X·(1⊗a − a⊗1)`, the product in the tensor algebra glues the last factor.
fn times_da(alg: &FiniteAlgebra, x: &Tensor, a: usize) -> Tensor {
    let d = alg.dim();
    let mut out = Tensor::new();
    for (k, c) in x {
        let mut up = k.clone();
        up.push(a);
        add_to(&mut out, up, c.clone());
        let last = *k.last().unwrap();
        for (m, p) in unital_product(alg, last, a) {
            let mut v = k[..k.len() - 1].to_vec();
            v.push(m);
            v.push(d);
            add_to(&mut out, v, c.mul(&p).neg());
        }
    }
    clean(out)
}

/// `a_0 da_1 … da_n` inside `Ã^{⊗(n+1)}` via `da = 1⊗a − a⊗1`.
fn embed(alg: &FiniteAlgebra, n: usize, v: &SparseVec<Rational>) -> Tensor {
    let mut out = Tensor::new();
    for (idx, c) in v.iter() {
        let t = decode(alg.dim(), n, idx).unwrap();
        let mut x: Tensor = [(vec![t[0]], q(1))].into_iter().collect();
        for &a in &t[1..] {
            x = times_da(alg, &x, a);
        }
        for (k, y) in x {
            add_to(&mut out, k, y.mul(c));
        }
    }
    clean(out)
}

fn act(alg: &FiniteAlgebra, x: &Tensor, a: usize, left: bool) -> Tensor {
    let mut out = Tensor::new();
    for (k, c) in x {
        let pos = if left { 0 } else { k.len() - 1 };
        let (l, r) = if left { (a, k[pos]) } else { (k[pos], a) };
        for (m, p) in unital_product(alg, l, r) {
            let mut v = k.clone();
            v[pos] = m;
            add_to(&mut out, v, c.mul(&p));
        }
    }
    clean(out)
}

fn combine(terms: Vec<(Tensor, Rational)>) -> Tensor {
    let mut out = Tensor::new();
    for (t, s) in terms {
        for (k, c) in t {
            add_to(&mut out, k, c.mul(&s));
        }
    }
    clean(out)
}

/// `δφ = d^{⊗(n+1)}` checked in the tensor-algebra model of `Ω`.
fn oracle_cobounds(alg: &FiniteAlgebra, phi: &CoboundingCochain) -> bool {
    let d = alg.dim();
    let n = phi.order();
    let w = |args: &[usize]| embed(alg, n + 1, phi.value(args));
    let tuples = (0..d.pow(n as u32 + 1)).map(|r| {
        let mut t = vec![0; n + 1];
        let mut r = r;
        for s in (0..=n).rev() {
            t[s] = r % d;
            r /= d;
        }
        t
    });
    for args in tuples {
        let mut terms = vec![(act(alg, &w(&args[1..]), args[0], true), q(1))];
        for i in 1..=n {
            for k in 0..d {
                let c = alg.constant(args[i - 1], args[i], k);
                if !c.is_zero() {
                    let mut m = args[..i - 1].to_vec();
                    m.push(k);
                    m.extend_from_slice(&args[i + 1..]);
                    terms.push((w(&m), c.signed(i % 2 == 1)));
                }
            }
        }
        terms.push((act(alg, &w(&args[..n]), args[n], false), q(1).signed(n % 2 == 0)));
        let mut rhs: Tensor = [(vec![d], q(1))].into_iter().collect();
        for &a in &args {
            rhs = times_da(alg, &rhs, a);
        }
        if combine(terms) != rhs {
            return false;
        }
    }
    true
}

#[test]
fn separable_algebras_cobound_at_zero() {
    for a in [complex(), c_plus_c(), m2c()] {
        let UniversalCoboundary::Solvable(phi) = solve_universal_coboundary(&a, 0) else { panic!("{:?}", a.names()) };
        assert!(phi.verify(&a));
        assert!(oracle_cobounds(&a, &phi));
    }
}

#[test]
fn upper_triangular_needs_one() {
    // hereditary, not separable: HH^1 with coefficients in Ω^1 is nonzero
    let ut = upper_triangular();
    assert!(!solve_universal_coboundary(&ut, 0).is_solvable());
    let UniversalCoboundary::Solvable(phi) = solve_universal_coboundary(&ut, 1) else { panic!() };
    assert!(oracle_cobounds(&ut, &phi));
    assert_eq!(bidimension_upper(&ut, 3), Bidimension::AtMost(1));
}

#[test]
fn dual_numbers_never_cobound() {
    let a = dual_numbers();
    for n in 0..=4 {
        match solve_universal_coboundary(&a, n) {
            UniversalCoboundary::Unsolvable(c) => {
                assert_eq!(c.n, n);
                assert_eq!(c.augmented_rank, c.rank + 1);
                assert_eq!(c.unknowns, 2usize.pow(n as u32) * chain_space_dim(2, n as isize + 1));
            }
            UniversalCoboundary::Solvable(_) => panic!("solvable at {n}"),
        }
    }
    assert_eq!(bidimension_upper(&a, 4), Bidimension::NotFound(4));
    assert_eq!(bidimension_upper(&c_plus_c(), 4), Bidimension::AtMost(0));
    assert_eq!(bidimension_upper(&m2c(), 4), Bidimension::AtMost(0));
}

#[test]
fn minimal_norm_solution_also_cobounds() {
    let a = m2c();
    let phi = solve_universal_coboundary_min_norm(&a, 0).cochain().unwrap().clone();
    assert!(oracle_cobounds(&a, &phi));
    // least norm: orthogonal to the homogeneous solutions
    let (m, _) = coboundary_system(&a, 0);
    let (_, kernel) = cyclo::exactnum::rank_kernel(&m);
    assert!(!kernel.is_empty());
    assert!(kernel.iter().all(|k| k.dot(&phi.flatten()).is_zero()));
}

#[test]
fn contraction_identity_on_c_plus_c() {
    let a = c_plus_c();
    let phi = solve_universal_coboundary(&a, 0).cochain().unwrap().clone();
    let ops = Operators::new(a.clone());
    let c = contraction_alpha(&ops, &phi, 3).unwrap();
    assert_eq!(c.checked_degrees(), 1..=3);
    for k in 1..=3 {
        let lhs = ops.b(k + 1).matmul(c.chain(k)).add(&c.chain(k - 1).matmul(&ops.b(k)));
        assert_eq!(lhs, SparseMat::identity(ops.dim(k as isize)));
        // dual identity on functionals
        let dual = c.cochain(k).matmul(&ops.b(k + 1).transpose()).add(&ops.b(k).transpose().matmul(&c.cochain(k - 1)));
        assert_eq!(dual, SparseMat::identity(ops.dim(k as isize)));
    }
}

#[test]
fn contraction_fails_for_a_wrong_phi() {
    let a = c_plus_c();
    let good = solve_universal_coboundary(&a, 0).cochain().unwrap().clone();
    let ut = upper_triangular();
    let phi_ut = solve_universal_coboundary(&ut, 1).cochain().unwrap().clone();
    assert!(contraction_alpha(&Operators::new(ut), &phi_ut, 4).is_ok());
    // φ of ℂ⊕ℂ read on the dual numbers, same dimension, not a solution there
    let ops = Operators::new(dual_numbers());
    assert!(matches!(contraction_alpha(&ops, &good, 3), Err(RetractError::HomotopyIdentityFailed(1))));
}

#[test]
fn retract_homology() {
    for (a, want) in [(c_plus_c(), (2, 0)), (m2c(), (1, 0)), (complex(), (1, 0))] {
        let phi = solve_universal_coboundary(&a, 0).cochain().unwrap().clone();
        let rc = build_retract(&a, &phi, 1).unwrap();
        let h = rc.homology();
        assert_eq!((h.even, h.odd), want);
        assert_eq!(hp_exact_from_retract(&a, &phi, 1).unwrap(), want);
        let r = hp_dims(&a, 3, 1).unwrap();
        assert_eq!((r.hp.even, r.hp.odd), want);
        // R∘I = 1
        let offs = rc.ambient_offsets();
        let inc = SparseMat::from_columns(*offs.last().unwrap(), rc.inclusion().columns().to_vec());
        assert_eq!(rc.retraction().matmul(&inc), SparseMat::identity(rc.dim()));
        assert_eq!(rc.dims().even + rc.dims().odd, rc.dim());
    }
}

#[test]
fn retract_at_larger_n_and_for_ut() {
    let a = c_plus_c();
    let phi = solve_universal_coboundary(&a, 0).cochain().unwrap().clone();
    assert_eq!(hp_exact_from_retract(&a, &phi, 2).unwrap(), (2, 0));
    let ut = upper_triangular();
    let phi = solve_universal_coboundary(&ut, 1).cochain().unwrap().clone();
    let r = hp_dims(&ut, 3, 1).unwrap();
    assert_eq!(hp_exact_from_retract(&ut, &phi, 2).unwrap(), (r.hp.even, r.hp.odd));
}

#[test]
fn retract_preconditions() {
    let a = c_plus_c();
    let phi = solve_universal_coboundary(&a, 0).cochain().unwrap().clone();
    assert!(matches!(build_retract(&a, &phi, 0), Err(RetractError::Precondition(_))));
    assert!(matches!(build_retract(&m2c(), &phi, 1), Err(RetractError::Precondition(_))));
    let ut = upper_triangular();
    let phi = solve_universal_coboundary(&ut, 1).cochain().unwrap().clone();
    assert!(matches!(build_retract(&ut, &phi, 1), Err(RetractError::Precondition(_))));
}

fn chi_plus(u: f64) -> Vec<f64> {
    let mut v = vec![0.0; 20];
    v[0] = 1.0;
    v[1] = u.sqrt();
    v
}

/// Stacked `ch e_±(u)` on `⊕_{k≤2} C_k`.
fn ch_e(u: f64, sign: f64) -> Vec<f64> {
    let a = x_squared_family().fiber_f64(u);
    let p = SparseVec::from_dense(&[0.5, sign * 0.5 / u.sqrt()]);
    chern_idempotent(&a, 1, &p, 2).unwrap().chain.to_stacked(2).to_dense(20)
}

#[test]
fn x_squared_pairings_are_preserved() {
    let f = x_squared_family();
    let (s, t) = (Rational::new(1, 2), q(2));
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 100));
    let r = retract_transport(&f, &s, &t, &chi_plus(0.5), &opts).unwrap();
    assert_eq!(r.hp, [2, 0]);
    assert_eq!(r.solvable_grid.len(), 151);
    assert!(r.solvable_grid.iter().all(|g| g.solvable));
    assert!(r.transport.pairing_drift(|u| ch_e(u, 1.0)) < 1e-6);
    assert!(r.transport.pairing_drift(|u| ch_e(u, -1.0)) < 1e-6);
    let end: f64 = r.transport.output.iter().zip(ch_e(2.0, 1.0)).map(|(a, b)| a * b).sum();
    assert!((end - 1.0).abs() < 1e-6, "{end}");
    assert!(r.transport.residuals.richardson_gap < 1e-6);
    assert!(r.transport.residuals.constraint_residual < 1e-9);
}

#[test]
fn crossing_zero_loses_solvability() {
    let f = x_squared_family();
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 100));
    let err = retract_transport(&f, &Rational::new(-1, 2), &Rational::new(1, 2), &chi_plus(0.5), &opts).unwrap_err();
    assert_eq!(err, RetractError::SolvabilityLost(q(0)));
    // a grid that steps over 0 still meets it at a midpoint
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 5));
    let err = retract_transport(&f, &Rational::new(-1, 10), &Rational::new(1, 2), &chi_plus(0.5), &opts).unwrap_err();
    assert_eq!(err, RetractError::SolvabilityLost(q(0)));
}

#[test]
fn jump_detector_and_safe_interval() {
    let f = x_squared_family();
    let mut opts = RetractTransportOptions::new(0, 1, Rational::new(1, 10));
    opts.max_jump = 1e-3;
    assert!(matches!(
        retract_transport(&f, &Rational::new(1, 2), &q(1), &chi_plus(0.5), &opts),
        Err(RetractError::GridDiscontinuity { .. })
    ));
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 2));
    assert!(matches!(
        retract_transport(&f, &q(1), &q(5), &chi_plus(1.0), &opts),
        Err(RetractError::Deformation(DeformationError::SafeIntervalViolation { .. }))
    ));
}

#[test]
fn input_must_lie_in_the_retract() {
    let f = x_squared_family();
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 10));
    let mut bad = chi_plus(1.0);
    bad[8] = 1.0;
    assert!(matches!(retract_transport(&f, &q(1), &q(2), &bad, &opts), Err(RetractError::Precondition(_))));
    assert!(matches!(retract_transport(&f, &q(1), &q(2), &[1.0], &opts), Err(RetractError::Precondition(_))));
}

#[test]
fn constant_family_is_the_identity() {
    let f = constant_family(&c_plus_c());
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 4));
    let mut input = vec![0.0; 20];
    input[0] = 1.0;
    input[1] = -2.0;
    input[5] = 0.5;
    let r = retract_transport(&f, &q(0), &q(3), &input, &opts).unwrap();
    assert_eq!(r.transport.output, input);
    assert_eq!(r.hp, [2, 0]);
}

#[test]
fn report_json_shape() {
    let f = constant_family(&c_plus_c());
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 2));
    let r = retract_transport(&f, &q(0), &q(1), &[0.0; 20], &opts).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["n", "N", "solvable_grid", "hp", "transport"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["hp"], serde_json::json!([2, 0]));
}

/// Window transport of `χ₊` paired with `ch e₊(t)` against the retract's
/// constant pairing. The window truncation breaks the duality, see the README.
#[test]
#[ignore = "red: window transport does not preserve the pairing"]
fn retract_and_window_pairings_agree() {
    let f = x_squared_family();
    let (s, t) = (Rational::new(1, 2), q(2));
    let r = retract_transport(&f, &s, &t, &chi_plus(0.5), &RetractTransportOptions::new(0, 1, Rational::new(1, 100))).unwrap();
    let retract_pairing: f64 = r.transport.output.iter().zip(ch_e(2.0, 1.0)).map(|(a, b)| a * b).sum();
    let chi = DualFunctional::new(0, SparseVec::from_pairs(vec![(0, 1.0), (1, 0.5f64.sqrt())]));
    let w = transport_dual(&f, &s, &t, &[chi], &TransportOptions::new(Method::Rk4, 2)).unwrap();
    let c = ch_e(2.0, 1.0);
    let window_pairing: f64 =
        w.output.iter().map(|phi| { let offs = cyclo::chains::stacked_offsets(2, 2); phi.coeffs.iter().map(|(i, x)| x * c[offs[phi.order] + i]).sum::<f64>() }).sum();
    assert!((retract_pairing - window_pairing).abs() < 1e-6, "{retract_pairing} vs {window_pairing}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// `(aω)b = a(ωb)` on `Ω^m`.
    #[test]
    fn bimodule_actions_commute(which in 0usize..5, m in 0usize..3, pick in any::<u64>(), x in any::<u64>(), y in any::<u64>()) {
        let a = [complex(), dual_numbers(), c_plus_c(), m2c(), upper_triangular()][which].clone();
        let d = a.dim();
        let w = (pick as usize) % chain_space_dim(d, m as isize);
        let t = decode(d, m, w).unwrap();
        let (x, y) = ((x as usize) % d, (y as usize) % d);
        let mut acc = cyclo::exactnum::Acc::new();
        omega_left_mul(&a, x, &t, &mut acc);
        let xw = acc.finish();
        let mut lhs = cyclo::exactnum::Acc::new();
        for (i, c) in xw.iter() {
            let mut tmp = cyclo::exactnum::Acc::new();
            omega_right_mul(&a, &decode(d, m, i).unwrap(), y, &mut tmp);
            lhs.extend(&tmp.finish(), c);
        }
        omega_right_mul(&a, &t, y, &mut acc);
        let wy = acc.finish();
        let mut rhs = cyclo::exactnum::Acc::new();
        for (i, c) in wy.iter() {
            let mut tmp = cyclo::exactnum::Acc::new();
            omega_left_mul(&a, x, &decode(d, m, i).unwrap(), &mut tmp);
            rhs.extend(&tmp.finish(), c);
        }
        prop_assert_eq!(lhs.finish(), rhs.finish());
    }

    /// The library's bimodule structure agrees with the tensor-algebra model.
    #[test]
    fn right_action_matches_tensor_model(which in 0usize..5, m in 0usize..3, pick in any::<u64>(), y in any::<u64>()) {
        let a = [complex(), dual_numbers(), c_plus_c(), m2c(), upper_triangular()][which].clone();
        let d = a.dim();
        let w = (pick as usize) % chain_space_dim(d, m as isize);
        let y = (y as usize) % d;
        let mut acc = cyclo::exactnum::Acc::new();
        omega_right_mul(&a, &decode(d, m, w).unwrap(), y, &mut acc);
        let lib = embed(&a, m, &acc.finish());
        let model = act(&a, &embed(&a, m, &SparseVec::unit(w)), y, false);
        prop_assert_eq!(lib, model);
    }
}
