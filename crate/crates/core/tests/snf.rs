mod common;

use ec_core::snf::sparse_invariant_factors;
use ec_core::{smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for (j, pivot) in m[0].iter().enumerate() {
        if pivot.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = pivot * det(&minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors from determinantal divisors: `d_k` is the gcd of all
/// `k × k` minors and the factors are `d_k / d_{k-1}`.
fn divisor_factors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m[0].len();
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=rows.min(cols) {
        let mut d = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<BigInt>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| BigInt::from(m[r][c])).collect()).collect();
                d = d.gcd(&det(&sub));
            }
        }
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

#[test]
fn factors_match_determinantal_divisors() {
    common::runner(0x5eed_0001, 96)
        .run(&matrix(), |m| {
            let snf = smith_normal_form(&IntMatrix::from_rows(&m), false);
            prop_assert_eq!(snf.factors, divisor_factors(&m));
            Ok(())
        })
        .unwrap();
}

#[test]
fn factors_divide_and_columns_are_unimodular() {
    common::runner(0x5eed_0002, 96)
        .run(&matrix(), |m| {
            let a = IntMatrix::from_rows(&m);
            let snf = smith_normal_form(&a, true);
            for w in snf.factors.windows(2) {
                prop_assert!(w[0].is_positive());
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            let v = snf.column.unwrap();
            let vi = snf.column_inverse.unwrap();
            prop_assert_eq!(v.mul(&vi), IntMatrix::identity(a.cols()));
            // The columns of A·V past the rank span the kernel.
            let av = a.mul(&v);
            for i in 0..av.rows() {
                for j in snf.factors.len()..av.cols() {
                    prop_assert!(av.get(i, j).is_zero());
                }
            }
            Ok(())
        })
        .unwrap();
}

#[test]
fn sparse_factors_agree_with_dense() {
    common::runner(0x5eed_0003, 96)
        .run(&matrix(), |m| {
            let cols = m[0].len();
            let rows: Vec<Vec<(usize, i64)>> = m
                .iter()
                .map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(j, &x)| (j, x)).collect())
                .collect();
            let dense = smith_normal_form(&IntMatrix::from_rows(&m), false).factors;
            prop_assert_eq!(sparse_invariant_factors(&rows, cols), dense);
            Ok(())
        })
        .unwrap();
}

#[test]
fn known_forms() {
    let snf = smith_normal_form(&IntMatrix::from_rows(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), false);
    assert_eq!(snf.factors, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    let snf = smith_normal_form(&IntMatrix::from_rows(&[vec![3i64]]), false);
    assert_eq!(snf.torsion(), vec![BigInt::from(3)]);
    let snf = smith_normal_form(&IntMatrix::zeros(2, 3), true);
    assert_eq!(snf.rank(), 0);
}
