//! Oracles shared by the integration tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use vondyck::zlinalg::{IntMatrix, SmithForm};

/// Fraction-free Gaussian elimination (Bareiss), independent of the SNF code.
pub fn bareiss_det(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Checks every defining property of a Smith form of `m`.
pub fn audit(m: &IntMatrix, snf: &SmithForm) -> Result<(), String> {
    let d = snf.u.mul(m).mul(&snf.v);
    if !d.is_diagonal() {
        return Err("U M V is not diagonal".into());
    }
    for i in 0..m.rows().min(m.cols()) {
        let expected = snf.diagonal.get(i).cloned().unwrap_or_default();
        if d[(i, i)] != expected {
            return Err(format!("diagonal entry {i} differs"));
        }
    }
    if snf.diagonal.iter().any(|x| !x.is_positive()) {
        return Err("non-positive invariant factor".into());
    }
    if snf.diagonal.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
        return Err("divisibility chain broken".into());
    }
    for (name, x) in [("U", &snf.u), ("V", &snf.v)] {
        if bareiss_det(x).abs() != BigInt::one() {
            return Err(format!("{name} is not unimodular"));
        }
    }
    Ok(())
}
