mod common;

use std::time::Instant;

use common::bareiss_rank;
use cyclo::algebra::examples::*;
use cyclo::chains::chain_space_dim;
use cyclo::exactnum::{rank, rank_kernel, SparseMat};
use cyclo::homology::{hc_dims, hh_dims, hp_dims, HomologyEngine, HomologyError};

#[test]
fn hh_matches_dense_oracle() {
    for (a, n_max) in [(complex(), 4), (dual_numbers(), 4), (c_plus_c(), 3), (upper_triangular(), 2), (m2c(), 2)] {
        let e = HomologyEngine::new(a.clone());
        let d = a.dim();
        let oracle: Vec<usize> = (0..=n_max)
            .map(|n| {
                let dim = chain_space_dim(d, n as isize);
                let out = if n == 0 { 0 } else { bareiss_rank(&e.operators().b(n)) };
                dim - out - bareiss_rank(&e.operators().b(n + 1))
            })
            .collect();
        assert_eq!(hh_dims(&a, n_max).unwrap(), oracle);
    }
}

#[test]
fn hh_tables() {
    assert_eq!(hh_dims(&complex(), 4).unwrap(), vec![1, 0, 0, 0, 0]);
    assert_eq!(hh_dims(&dual_numbers(), 4).unwrap(), vec![2, 1, 1, 1, 1]);
    assert_eq!(hh_dims(&m2c(), 3).unwrap(), vec![1, 0, 0, 0]);
}

#[test]
fn hc_tables() {
    assert_eq!(hc_dims(&complex(), 2).unwrap(), (1, 0));
    for n in 1..=3 {
        assert_eq!(hc_dims(&c_plus_c(), n).unwrap(), (2, 0));
        // the reduced even class survives in HC but dies under S
        assert_eq!(hc_dims(&dual_numbers(), n).unwrap(), (2, 0));
    }
}

/// `rank S_*` from explicit cycles: `rank[S·Z | im d_{m−1}] − rank im d_{m−1}`.
fn s_rank_oracle(e: &HomologyEngine, m: usize) -> usize {
    let top = e.operators().dim(m as isize);
    let (_, cycles) = rank_kernel(&e.total_differential(m, usize::MAX));
    let rows = e.cc_dim(m as isize - 2, usize::MAX);
    let shifted: Vec<_> = cycles.iter().map(|z| z.reindex(|i| i.checked_sub(top))).collect();
    let sz = SparseMat::from_columns(rows, shifted);
    let bd = e.total_differential(m - 1, usize::MAX);
    rank(&SparseMat::hcat(&[&sz, &bd])) - rank(&bd)
}

#[test]
fn s_ranks_match_explicit_cycles() {
    for a in [complex(), dual_numbers(), c_plus_c(), upper_triangular()] {
        let e = HomologyEngine::new(a);
        let s = e.s_power_ranks(5, 1).unwrap();
        for m in 2..=5 {
            assert_eq!(s[m], s_rank_oracle(&e, m), "degree {m}");
        }
    }
}

#[test]
fn hp_tables() {
    for (a, want) in [(c_plus_c(), (2, 0)), (dual_numbers(), (1, 0)), (m2c(), (1, 0)), (complex(), (1, 0))] {
        let r = hp_dims(&a, 3, 1).unwrap();
        assert_eq!((r.hp.even, r.hp.odd), want);
        assert!(r.hp.stabilized);
        assert!(r.lim1_ignored);
    }
}

#[test]
fn dual_numbers_odd_s_rank_vanishes() {
    let r = hp_dims(&dual_numbers(), 3, 1).unwrap();
    assert!(r.s_ranks.iter().skip(1).all(|s| s[1] == 0));
    // raw dimensions alone would overcount the even part
    assert!(r.hc.last().unwrap()[0] > r.hp.even);
}

#[test]
fn wider_window_agrees() {
    for a in [c_plus_c(), dual_numbers()] {
        let r1 = hp_dims(&a, 4, 1).unwrap();
        let r2 = hp_dims(&a, 4, 2).unwrap();
        assert!(r2.hp.stabilized);
        assert_eq!((r1.hp.even, r1.hp.odd), (r2.hp.even, r2.hp.odd));
    }
}

#[test]
fn report_json_shape() {
    let r = hp_dims(&c_plus_c(), 3, 1).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["hp"]["even"], 2);
    assert_eq!(v["hc"][1], serde_json::json!([2, 0]));
    assert!(v["s_ranks"].is_array() && v["hh"].is_array());
}

#[test]
fn bad_window_is_rejected() {
    assert!(matches!(hp_dims(&complex(), 1, 2), Err(HomologyError::Invalid(_))));
}

#[test]
fn m2_at_n3() {
    let t = Instant::now();
    assert_eq!(hc_dims(&m2c(), 3).unwrap(), (1, 0));
    println!("M2(C) window N=3 in {:?}", t.elapsed());
}
