#![allow(dead_code)]

use cyclo::exactnum::{QMatrix, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Fraction-free dense elimination; every entry must be an integer.
pub fn bareiss_rank(m: &QMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m
        .to_dense()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    assert!(x.is_integer(), "oracle needs integer entries");
                    x.numer()
                })
                .collect()
        })
        .collect();
    let (nr, nc) = (a.len(), m.ncols());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..nc {
        let Some(p) = (r..nr).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..nr {
            for j in c + 1..nc {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == nr {
            break;
        }
    }
    r
}

pub fn q(n: i64) -> Rational {
    Rational::integer(n)
}
