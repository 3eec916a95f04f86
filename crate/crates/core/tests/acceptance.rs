//! The nine acceptance criteria, one line each. Criteria 1, 3 and 6 are timed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cyclo::algebra::examples::{c_plus_c, dual_numbers, m2c, suite, upper_triangular};
use cyclo::chains::{random_cochain, random_poly_cochain};
use cyclo::chern::{chern_idempotent, chern_invertible, PeriodicChain};
use cyclo::deformation::{
    constant_family, from_filtered, gauge_independence, gm_chain_map_check, transport, triviality_obstruction, x_squared_family,
    Method, Obstruction, TransportOptions,
};
use cyclo::homology::hp_dims;
use cyclo::operators::identities::{check_all, check_lm_equals_b};
use cyclo::retract::{bidimension_upper, retract_transport, Bidimension, RetractError, RetractTransportOptions};
use cyclo::{ChainVector, Operators, Rational, SparseVec};

type Verdict = Result<String, String>;

fn q(n: i64) -> Rational {
    Rational::integer(n)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn identity_suite() -> Verdict {
    let mut count = 0;
    for (name, a) in suite() {
        let ops = Operators::new(a.clone());
        for seed in 0..10u64 {
            let (k, l) = (1 + (seed % 3) as usize, 1 + ((seed + 1) % 3) as usize);
            let (d, e) = (random_cochain(&a, k, 100 + seed), random_cochain(&a, l, 200 + seed));
            check_all(&ops, &d, &e, 5).map_err(|f| format!("{name}, seed {seed}: {} on C_{}", f.name, f.degree))?;
            count += 1;
        }
    }
    Ok(format!("{count} cochain pairs on 5 algebras, n ≤ 5, all exact"))
}

fn lm_equals_b() -> Verdict {
    for (name, a) in suite() {
        let ops = Operators::new(a);
        for n in 0..=5 {
            check_lm_equals_b(&ops, n).map_err(|f| format!("{name}: {} on C_{}", f.name, f.degree))?;
        }
    }
    Ok("5 algebras, n ≤ 5".into())
}

fn homology_tables() -> Verdict {
    let mut out = Vec::new();
    for (name, a, want) in [("C+C", c_plus_c(), (2, 0)), ("dual numbers", dual_numbers(), (1, 0)), ("M2(C)", m2c(), (1, 0))] {
        let r = hp_dims(&a, 3, 1).map_err(|e| format!("{name}: {e}"))?;
        ensure((r.hp.even, r.hp.odd) == want && r.hp.stabilized, format!("{name}: got ({}, {}), stabilized {}", r.hp.even, r.hp.odd, r.hp.stabilized))?;
        out.push(format!("{name} ({}, {})", r.hp.even, r.hp.odd));
    }
    Ok(out.join(", ") + ", stabilized by N = 3")
}

/// `b ω_{k+1} + B ω_{k−1} = 0` for every `k + 1 ≤ cutoff`, recomputed here.
fn closed_through(ops: &Operators, ch: &PeriodicChain) -> Result<usize, String> {
    let start = if ch.cutoff % 2 == 0 { 2 } else { 1 };
    let mut k = start;
    while k <= ch.cutoff {
        let mut r = ops.b(k).mul_vec(&ch.component(k));
        if k >= 2 {
            r = r.add(&ops.connes(k - 2).mul_vec(&ch.component(k - 2)));
        }
        ensure(r.is_zero(), format!("degree {k}: residual with {} entries", r.nnz()))?;
        k += 2;
    }
    Ok(k - 2)
}

fn chern_closedness() -> Verdict {
    let a = c_plus_c();
    let ops = Operators::new(a.clone());
    let p = chern_idempotent(&a, 2, &SparseVec::unit(0), 8).map_err(|e| e.to_string())?;
    ensure(p.chain.component(8).nnz() > 0, "ch P vanishes in degree 8")?;
    let top_p = closed_through(&ops, &p).map_err(|e| format!("ch P: {e}"))?;
    let u = SparseVec::from_pairs(vec![(0, q(1)), (1, q(-1))]);
    let chu = chern_invertible(&a, 1, &u, 9).map_err(|e| e.to_string())?;
    let top_u = closed_through(&ops, &chu).map_err(|e| format!("ch U: {e}"))?;
    Ok(format!("P = diag(e1, 0) exact through degree {top_p}, U = e1 − e2 through degree {top_u}"))
}

fn chain_map_gate() -> Verdict {
    let ut = from_filtered(&upper_triangular(), &[0, 0, 1]).map_err(|e| e.to_string())?;
    for (name, fam) in [("x^2 = t", x_squared_family()), ("filtered UT", ut)] {
        let r = gm_chain_map_check(&fam, 6).map_err(|e| e.to_string())?;
        ensure(r.interior_zero, format!("{name}: {:?}", r.interior))?;
    }
    Ok("interior residuals are the zero polynomial for x^2 = t and filtered UT, 2N = 6".into())
}

fn ch_e_plus_one(top: usize) -> ChainVector<f64> {
    let f = x_squared_family();
    let p = SparseVec::from_pairs(vec![(0, Rational::new(1, 2)), (1, Rational::new(1, 2))]);
    chern_idempotent(&f.fiber(&q(1)), 1, &p, top).unwrap().chain.map(|x| x.to_f64())
}

fn max_diff(a: &ChainVector<f64>, b: &ChainVector<f64>) -> f64 {
    a.sub(b).components().values().map(|v| v.max_abs()).fold(0.0, f64::max)
}

fn transport_invariance() -> Verdict {
    let f = x_squared_family();
    let w = ch_e_plus_one(6);
    let opts = TransportOptions::new(Method::Rk4, 6);
    let r = transport(&f, &q(1), &q(4), &w, &opts).map_err(|e| e.to_string())?;
    let d = transport(&f, &q(1), &q(4), &w, &TransportOptions::new(Method::Dyson, 6)).map_err(|e| e.to_string())?;
    let back = transport(&f, &q(4), &q(1), &r.output, &opts).map_err(|e| e.to_string())?;
    // χ₊ at t = 4 sends x to √4
    let out0 = r.output.component(0);
    let pairing = out0.get(0) + 2.0 * out0.get(1);
    let gap = max_diff(&r.output, &d.output);
    let trip = max_diff(&back.output, &w);
    let detail = format!("pairing {pairing:.6} (want 1), rk4 vs dyson {gap:.1e}, round trip {trip:.1e}");
    ensure((pairing - 1.0).abs() <= 1e-6 && gap <= 1e-8 && trip <= 1e-8, detail.clone())?;
    Ok(detail)
}

fn chi_plus(u: f64) -> Vec<f64> {
    let mut v = vec![0.0; 20];
    v[0] = 1.0;
    v[1] = u.sqrt();
    v
}

fn ch_e_plus(u: f64) -> Vec<f64> {
    let a = x_squared_family().fiber_f64(u);
    let p = SparseVec::from_dense(&[0.5, 0.5 / u.sqrt()]);
    chern_idempotent(&a, 1, &p, 2).unwrap().chain.to_stacked(2).to_dense(20)
}

fn rigidity() -> Verdict {
    for (name, a, want) in [("C+C", c_plus_c(), Bidimension::AtMost(0)), ("M2(C)", m2c(), Bidimension::AtMost(0)), ("dual numbers", dual_numbers(), Bidimension::NotFound(4))] {
        let got = bidimension_upper(&a, 4);
        ensure(got == want, format!("{name}: {got:?}, want {want:?}"))?;
    }
    let f = x_squared_family();
    let opts = RetractTransportOptions::new(0, 1, Rational::new(1, 100));
    let rep = retract_transport(&f, &Rational::new(1, 2), &q(2), &chi_plus(0.5), &opts).map_err(|e| e.to_string())?;
    let drift = rep.transport.pairing_drift(ch_e_plus);
    ensure(drift <= 1e-6, format!("retract pairing drift {drift:.1e}"))?;
    match retract_transport(&f, &Rational::new(-1, 2), &Rational::new(1, 2), &chi_plus(0.5), &opts) {
        Err(RetractError::SolvabilityLost(t)) if t == q(0) => {}
        other => return Err(format!("across 0: {:?}", other.map(|r| r.hp))),
    }
    Ok(format!("bidimension 0, 0, NotFound(4); retract drift {drift:.1e} on [1/2, 2]; SolvabilityLost(0) across 0"))
}

fn gauge_independence_check() -> Verdict {
    let f = x_squared_family();
    let w = ch_e_plus_one(4);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for seed in 0..3 {
        let fc = random_poly_cochain(2, 1, 1, seed);
        for t in [Rational::new(3, 2), q(2)] {
            let r = gauge_independence(&f, &fc, &q(1), &t, &w, 4).map_err(|e| e.to_string())?;
            worst = worst.max(r.max_relative_pairing);
            failures += usize::from(!r.is_boundary);
        }
    }
    let detail = format!("{failures}/6 differences are not window boundaries, max relative cocycle pairing {worst:.2}");
    ensure(failures == 0, detail.clone())?;
    Ok(detail)
}

fn triviality() -> Verdict {
    match triviality_obstruction(&x_squared_family()).map_err(|e| e.to_string())? {
        Obstruction::Obstructed { t0 } if t0 == q(0) => {}
        o => return Err(format!("x^2 = t: {o:?}")),
    }
    ensure(matches!(triviality_obstruction(&constant_family(&m2c())), Ok(Obstruction::Witness(_))), "constant family has no witness")?;
    let ut = from_filtered(&upper_triangular(), &[0, 0, 1]).map_err(|e| e.to_string())?;
    ensure(matches!(triviality_obstruction(&ut), Ok(Obstruction::Witness(_))), "filtered UT has no witness")?;
    for t in [0, 1] {
        let r = hp_dims(&ut.fiber(&q(t)), 3, 1).map_err(|e| e.to_string())?;
        ensure((r.hp.even, r.hp.odd) == (2, 0), format!("filtered UT at t = {t}: ({}, {})", r.hp.even, r.hp.odd))?;
    }
    Ok("obstructed at 0 for x^2 = t; witnesses for constant and filtered UT; HP = (2, 0) at t = 0, 1".into())
}

struct Criterion {
    number: usize,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Verdict,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { number: 1, title: "operator identity suite", limit: Some(Duration::from_secs(60)), run: identity_suite },
        Criterion { number: 2, title: "L_m = b", limit: None, run: lm_equals_b },
        Criterion { number: 3, title: "homology tables", limit: Some(Duration::from_secs(120)), run: homology_tables },
        Criterion { number: 4, title: "Chern closedness", limit: None, run: chern_closedness },
        Criterion { number: 5, title: "Gauss-Manin chain-map gate", limit: None, run: chain_map_gate },
        Criterion { number: 6, title: "transport invariance", limit: Some(Duration::from_secs(30)), run: transport_invariance },
        Criterion { number: 7, title: "rigidity pipeline", limit: None, run: rigidity },
        Criterion { number: 8, title: "∇_GM well-definedness", limit: None, run: gauge_independence_check },
        Criterion { number: 9, title: "triviality obstruction", limit: None, run: triviality },
    ];
    let mut red = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let verdict = match (verdict, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {took:.1?}, limit {limit:?}")),
            (v, _) => v,
        };
        let timing = c.limit.map(|l| format!(" [{took:.2?} of {}s]", l.as_secs())).unwrap_or_default();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS {}{timing}: {detail}", c.number, c.title),
            Err(detail) => {
                println!("criterion {}: FAIL {}{timing}: {detail}", c.number, c.title);
                red.push(c.number);
            }
        }
    }
    assert!(red.is_empty(), "failing criteria: {red:?}");
}
