//! Shared inputs for the criterion benches.

use cyclo::chern::chern_idempotent;
use cyclo::deformation::x_squared_family;
use cyclo::exactnum::{QMatrix, Rational, SparseVec};
use cyclo::ChainVector;

/// `ch e₊` at `t = 1` for `x² = t`, through degree `top`.
pub fn ch_e_plus(top: usize) -> ChainVector<f64> {
    let f = x_squared_family();
    let p = SparseVec::from_pairs(vec![(0, Rational::new(1, 2)), (1, Rational::new(1, 2))]);
    chern_idempotent(&f.fiber(&Rational::integer(1)), 1, &p, top).expect("idempotent").chain.map(|x| x.to_f64())
}

/// A deterministic `n × n` integer matrix of rank about `n / 2`.
pub fn half_rank_matrix(n: usize) -> QMatrix {
    let r = n / 2;
    let trip = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, Rational::integer((((i % r.max(1)) * 7 + j * 3) % 5) as i64 - 2)))
        .collect();
    QMatrix::from_triplets(n, n, trip)
}
