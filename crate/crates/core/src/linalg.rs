//! Small dense exact linear algebra over the integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::Rational;

pub type IntMatrix = Vec<Vec<i64>>;

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
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
                a[i][j] = v.div_floor(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Sylvester's criterion: the k-th leading principal minor has sign `(-1)^k`.
pub fn check_negative_definite(m: &[Vec<i64>]) -> Result<()> {
    let n = m.len();
    if let Some((i, row)) = m.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "row {i} has {} entries, expected {n}",
            row.len()
        )));
    }
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x != m[j][i] {
                return Err(Error::NotNegativeDefinite(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    for k in 1..=n {
        let minor: IntMatrix = m[..k].iter().map(|row| row[..k].to_vec()).collect();
        let det = determinant(&minor);
        let expected_negative = k % 2 == 1;
        if det.is_zero() || det.is_negative() != expected_negative {
            return Err(Error::NotNegativeDefinite(format!(
                "leading minor of order {k} is {det}"
            )));
        }
    }
    Ok(())
}

/// Solves `m x = b` exactly by Gauss–Jordan elimination.
pub fn solve(m: &[Vec<i64>], b: &[i64]) -> Result<Vec<Rational>> {
    let n = m.len();
    if b.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "cannot solve a {n}x{n} system with a right-hand side of length {}",
            b.len()
        )));
    }
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            row.iter()
                .chain(std::iter::once(&bi))
                .map(|&x| Rational::from_integer(x.into()))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !aug[r][col].is_zero())
            .ok_or(Error::Singular)?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    Ok(aug.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

pub fn dot(u: &[i64], v: &[i64]) -> i64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// `A A^t`.
pub fn gram(a: &[Vec<i64>]) -> IntMatrix {
    a.iter()
        .map(|u| a.iter().map(|v| dot(u, v)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    #[test]
    fn determinants() {
        assert_eq!(determinant(&[]), BigInt::from(1));
        assert_eq!(determinant(&[vec![-2]]), BigInt::from(-2));
        let q = vec![vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -2]];
        assert_eq!(determinant(&q), BigInt::from(-7));
        let swap = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(determinant(&swap), BigInt::from(-1));
    }

    #[test]
    fn definiteness() {
        assert!(check_negative_definite(&[vec![-3]]).is_ok());
        assert!(check_negative_definite(&[vec![-1, 1], vec![1, -1]]).is_err());
        assert!(check_negative_definite(&[vec![-2, 1], vec![0, -2]]).is_err());
        assert!(check_negative_definite(&[vec![2]]).is_err());
        assert!(matches!(
            check_negative_definite(&[vec![-2, 1], vec![1]]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn solves_exactly() {
        let q = vec![vec![-2]];
        assert_eq!(solve(&q, &[2]).unwrap(), vec![rational(-1, 1)]);
        let q = vec![vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -2]];
        let x = solve(&q, &[1, 0, 0]).unwrap();
        assert_eq!(x, vec![rational(-3, 7), rational(-2, 7), rational(-1, 7)]);
        assert_eq!(solve(&[vec![0]], &[1]), Err(Error::Singular));
    }
}
