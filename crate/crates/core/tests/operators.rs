use cyclo::algebra::examples::suite;
use cyclo::chains::{chain_space_dim, decode, encode, random_cochain};
use cyclo::operators::identities::check_all;
use cyclo::Operators;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The identity suite for random cochains `D` of order ≤ 3 and `E` of order ≤ 2.
    #[test]
    fn identities_for_random_cochains(alg in 0usize..5, seed in 1000u64..u64::MAX / 2, k in 1usize..=3, l in 1usize..=2) {
        let (name, a) = suite().swap_remove(alg);
        let ops = Operators::new(a.clone());
        let (dc, ec) = (random_cochain(&a, k, seed), random_cochain(&a, l, seed + 1));
        let top = if a.dim() >= 4 { 2 } else { 3 };
        let res = check_all(&ops, &dc, &ec, top);
        prop_assert!(res.is_ok(), "{}: {:?}", name, res.err());
    }
}

proptest! {
    #[test]
    fn codec_round_trips(d in 1usize..=4, n in 0usize..=6, idx: usize) {
        let dim = chain_space_dim(d, n as isize);
        let i = idx % dim;
        let t = decode(d, n, i).unwrap();
        prop_assert_eq!(encode(d, n, &t).unwrap(), i);
        prop_assert!(decode(d, n, dim).is_err());
    }
}

#[test]
fn chain_space_dim_counts_the_basis() {
    for d in 1..=4usize {
        for n in 0..=6usize {
            // slot 0 ranges over A_+ except in degree 0
            let first = if n == 0 { d } else { d + 1 };
            let mut count = 0;
            let mut t = vec![0usize; n + 1];
            'outer: loop {
                count += 1;
                assert!(encode(d, n, &t).is_ok());
                for s in (0..=n).rev() {
                    let bound = if s == 0 { first } else { d };
                    t[s] += 1;
                    if t[s] < bound {
                        continue 'outer;
                    }
                    t[s] = 0;
                }
                break;
            }
            assert_eq!(count, chain_space_dim(d, n as isize), "d = {d}, n = {n}");
        }
    }
}
