use std::fmt;

use serde::Serialize;

use super::{EmbeddingMatrix, FormBlock};
use crate::changemaker::{is_changemaker, ChangemakerVector};
use crate::error::{Error, Result};

/// The first reason a matrix fails to be a valid embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Gram {
        row: usize,
        col: usize,
        expected: i64,
        actual: i64,
    },
    /// `y_i` has an entry outside `{0, 1, -1}` or the wrong number of nonzeros.
    YShape {
        i: usize,
    },
    /// `y_i` and `y_{i+1}` do not meet in exactly one column with opposite signs.
    AdjacentOverlap {
        i: usize,
    },
    /// `y_i` and `y_j` share a column although `|i - j| >= 2`.
    DistantOverlap {
        i: usize,
        j: usize,
    },
    /// `x` is nonzero somewhere on the support of `y_i`, `i >= 3`.
    XOnTail {
        i: usize,
    },
    /// `x` does not meet `y_2` in exactly one column with product `-1`.
    XUnit,
    NotChangemaker {
        values: Vec<i64>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Gram {
                row,
                col,
                expected,
                actual,
            } => write!(
                f,
                "-A A^t has {actual} at ({row}, {col}), expected {expected}"
            ),
            Violation::YShape { i } => write!(f, "y_{i} is not a 0/±1 vector of the right weight"),
            Violation::AdjacentOverlap { i } => {
                write!(
                    f,
                    "y_{i} and y_{} do not overlap in one opposite-sign column",
                    i + 1
                )
            }
            Violation::DistantOverlap { i, j } => write!(f, "y_{i} and y_{j} overlap"),
            Violation::XOnTail { i } => write!(f, "x is nonzero on the support of y_{i}"),
            Violation::XUnit => write!(f, "x does not meet y_2 in a single unit column"),
            Violation::NotChangemaker { values } => {
                write!(f, "{values:?} is not a changemaker set")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub violation: Option<Violation>,
    /// The changemaker part of `x`, zeros dropped.
    pub sigma: Option<ChangemakerVector>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }

    fn fail(v: Violation) -> Self {
        Self {
            violation: Some(v),
            sigma: None,
        }
    }
}

/// Checks `-A A^t = Q_X ⊕ Q_W` and the changemaker structure of the rows
/// `x, y_2, ..., y_l`.
pub fn verify_embedding(a: &EmbeddingMatrix, blocks: &FormBlock) -> Result<Verification> {
    if a.rank() != blocks.rank() || a.b() != blocks.b() {
        return Err(Error::DimensionMismatch(format!(
            "embedding has rank {} with b = {}, blocks need rank {} with b = {}",
            a.rank(),
            a.b(),
            blocks.rank(),
            blocks.b()
        )));
    }
    let target = blocks.direct_sum();
    let gram = a.negative_gram();
    for (row, (g, t)) in gram.iter().zip(&target).enumerate() {
        for (col, (&actual, &expected)) in g.iter().zip(t).enumerate() {
            if actual != expected {
                return Ok(Verification::fail(Violation::Gram {
                    row,
                    col,
                    expected,
                    actual,
                }));
            }
        }
    }
    Ok(check_structure(a.w_rows(), blocks.slope().word()))
}

fn support(v: &[i64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(c, _)| c)
        .collect()
}

/// `w` holds `x, y_2, ..., y_l`; `y_i` is `w[i - 1]`.
fn check_structure(w: &[Vec<i64>], word: &[i64]) -> Verification {
    let x = &w[0];
    let changemaker_part = |skip: &[bool]| -> Vec<i64> {
        x.iter()
            .zip(skip)
            .filter(|(_, &s)| !s)
            .map(|(&v, _)| v.abs())
            .collect()
    };
    let mut covered = vec![false; x.len()];
    if w.len() > 1 {
        let supports: Vec<Vec<usize>> = w.iter().map(|r| support(r)).collect();
        for i in 2..=w.len() {
            let y = &w[i - 1];
            if y.iter().any(|v| v.abs() > 1) || supports[i - 1].len() as i64 != word[i - 1] {
                return Verification::fail(Violation::YShape { i });
            }
        }
        for i in 2..w.len() {
            let shared: Vec<usize> = supports[i - 1]
                .iter()
                .copied()
                .filter(|&c| w[i][c] != 0)
                .collect();
            if shared.len() != 1 || w[i - 1][shared[0]] * w[i][shared[0]] != -1 {
                return Verification::fail(Violation::AdjacentOverlap { i });
            }
        }
        for i in 2..=w.len() {
            for j in i + 2..=w.len() {
                if supports[i - 1].iter().any(|&c| w[j - 1][c] != 0) {
                    return Verification::fail(Violation::DistantOverlap { i, j });
                }
            }
        }
        for i in 3..=w.len() {
            if supports[i - 1].iter().any(|&c| x[c] != 0) {
                return Verification::fail(Violation::XOnTail { i });
            }
        }
        let hits: Vec<usize> = supports[1].iter().copied().filter(|&c| x[c] != 0).collect();
        if hits.len() != 1 || x[hits[0]] * w[1][hits[0]] != -1 {
            return Verification::fail(Violation::XUnit);
        }
        for s in &supports[1..] {
            for &c in s {
                covered[c] = true;
            }
        }
    }
    let values = changemaker_part(&covered);
    let nonzero: Vec<i64> = values.iter().copied().filter(|&v| v != 0).collect();
    match ChangemakerVector::new(&nonzero) {
        Ok(sigma) => {
            debug_assert!(is_changemaker(&values).unwrap_or(false));
            Verification {
                violation: None,
                sigma: Some(sigma),
            }
        }
        Err(_) => Verification::fail(Violation::NotChangemaker { values }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::hj_expand;

    fn blocks(qx: Vec<Vec<i64>>, p: u64, q: u64) -> FormBlock {
        FormBlock::new(qx, &hj_expand(p, q).unwrap()).unwrap()
    }

    #[test]
    fn accepts_three_halves_certificate() {
        let b = blocks(vec![vec![-3]], 3, 2);
        let a =
            EmbeddingMatrix::new(vec![vec![1, 1, 1], vec![1, -1, 0], vec![0, 1, -1]], 1).unwrap();
        let v = verify_embedding(&a, &b).unwrap();
        assert!(v.ok(), "{:?}", v.violation);
        assert_eq!(v.sigma.unwrap().values(), &[1]);
    }

    #[test]
    fn rejects_wrong_gram() {
        let b = blocks(vec![vec![-2]], 3, 2);
        let a =
            EmbeddingMatrix::new(vec![vec![1, 1, 0], vec![1, -1, 0], vec![0, 1, -1]], 1).unwrap();
        let v = verify_embedding(&a, &b).unwrap();
        assert!(matches!(v.violation, Some(Violation::Gram { .. })));
    }

    #[test]
    fn integral_slopes_need_changemaker_last_row() {
        let b = blocks(vec![], 1, 1);
        let a = EmbeddingMatrix::new(vec![vec![1]], 0).unwrap();
        assert!(verify_embedding(&a, &b).unwrap().ok());
        let b = blocks(vec![vec![-1]], 4, 1);
        let a = EmbeddingMatrix::new(vec![vec![1, 0], vec![0, 2]], 1).unwrap();
        let v = verify_embedding(&a, &b).unwrap();
        assert_eq!(
            v.violation,
            Some(Violation::NotChangemaker { values: vec![0, 2] })
        );
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b = blocks(vec![vec![-3]], 3, 2);
        let a = EmbeddingMatrix::new(vec![vec![1]], 0).unwrap();
        assert!(verify_embedding(&a, &b).is_err());
    }

    #[test]
    fn x_meeting_y2_twice_is_rejected() {
        // Gram-correct for 9/2 = [5, 2], but x meets y_2 in two columns.
        let b = blocks(vec![vec![-1]], 9, 2);
        let a =
            EmbeddingMatrix::new(vec![vec![0, 0, 1], vec![2, 1, 0], vec![-1, 1, 0]], 1).unwrap();
        let v = verify_embedding(&a, &b).unwrap();
        assert_eq!(v.violation, Some(Violation::XUnit));
    }
}
