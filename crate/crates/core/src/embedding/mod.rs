//! Embeddings of `Q_X ⊕ Q_W` into the standard negative-definite diagonal
//! lattice, i.e. integer matrices `A` with `-A A^t = Q_X ⊕ Q_W`.
//!
//! Rows of `A` are ordered as the `b` rows for `Q_X` followed by the `l`
//! rows `x, y_2, ..., y_l` for the plumbing of the slope. Columns are the
//! standard basis of the ambient lattice, which is only determined up to
//! permutations and sign changes.

mod obstruct;
mod search;
mod verify;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::numeric::SurgerySlope;
use crate::plumbing::{build_matrix, PlumbingMatrix};

pub use obstruct::{obstruct, HypothesisStatus, ObstructionVerdict, Verdict};
pub use search::{search_embedding, SearchOptions, SearchOutcome, DEFAULT_MAX_RANK};
pub use verify::{verify_embedding, Verification, Violation};

/// The pair `(Q_X, Q_W)` for a slope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormBlock {
    qx: IntMatrix,
    qw: PlumbingMatrix,
    slope: SurgerySlope,
}

impl FormBlock {
    pub fn new(qx: IntMatrix, slope: &SurgerySlope) -> Result<Self> {
        linalg::check_negative_definite(&qx)?;
        Ok(Self {
            qx,
            qw: build_matrix(slope),
            slope: slope.clone(),
        })
    }

    pub fn qx(&self) -> &IntMatrix {
        &self.qx
    }

    pub fn qw(&self) -> &PlumbingMatrix {
        &self.qw
    }

    pub fn slope(&self) -> &SurgerySlope {
        &self.slope
    }

    /// `b_2(X)`.
    pub fn b(&self) -> usize {
        self.qx.len()
    }

    pub fn l(&self) -> usize {
        self.qw.len()
    }

    pub fn rank(&self) -> usize {
        self.b() + self.l()
    }

    /// `Q_X ⊕ Q_W`.
    pub fn direct_sum(&self) -> IntMatrix {
        let (b, n) = (self.b(), self.rank());
        let mut m = vec![vec![0; n]; n];
        for (row, qx_row) in m.iter_mut().zip(&self.qx) {
            row[..b].copy_from_slice(qx_row);
        }
        for i in 0..self.l() {
            m[b + i][b..].copy_from_slice(self.qw.row(i));
        }
        m
    }
}

/// Parses `{"matrix": [[...]]}` or a bare `[[...]]`.
pub fn parse_qx(json: &str) -> Result<IntMatrix> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum QxInput {
        Wrapped { matrix: IntMatrix },
        Bare(IntMatrix),
    }
    let parsed: QxInput =
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("Q_X: {e}")))?;
    Ok(match parsed {
        QxInput::Wrapped { matrix } => matrix,
        QxInput::Bare(m) => m,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    rows: IntMatrix,
    b: usize,
}

impl EmbeddingMatrix {
    pub fn new(rows: IntMatrix, b: usize) -> Result<Self> {
        let n = rows.len();
        if b > n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "embedding matrix must be square with at least {b} rows"
            )));
        }
        Ok(Self { rows, b })
    }

    pub fn rows(&self) -> &IntMatrix {
        &self.rows
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn qx_rows(&self) -> &[Vec<i64>] {
        &self.rows[..self.b]
    }

    /// `x, y_2, ..., y_l`.
    pub fn w_rows(&self) -> &[Vec<i64>] {
        &self.rows[self.b..]
    }

    /// `-A A^t`.
    pub fn negative_gram(&self) -> IntMatrix {
        linalg::gram(&self.rows)
            .into_iter()
            .map(|r| r.into_iter().map(|x| -x).collect())
            .collect()
    }

    /// Rows in the order the search builds them: `x, y_2, ..., y_l`, then
    /// the rows for `Q_X`.
    fn search_order(&self) -> Vec<usize> {
        (self.b..self.rank()).chain(0..self.b).collect()
    }
}

/// Puts `A` into normal form by signed column permutations.
///
/// Rows are visited in search order. At each row, columns that are zero in
/// every earlier row get the sign making this row's entry non-negative, and
/// columns with identical history are stably sorted so that this row's
/// entries are non-increasing within each class. The result is idempotent
/// and preserves `A A^t`.
pub fn normalize(a: &EmbeddingMatrix) -> EmbeddingMatrix {
    let n = a.rank();
    let order = a.search_order();
    let mut cols: Vec<Vec<i64>> = (0..n)
        .map(|c| order.iter().map(|&r| a.rows[r][c]).collect())
        .collect();
    for step in 0..order.len() {
        for col in cols.iter_mut() {
            if col[..step].iter().all(|&x| x == 0) && col[step] < 0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
        }
        // Stable sort within each history class: positions of a class keep
        // their set of indices and are refilled in sorted order.
        let mut classes: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (c, col) in cols.iter().enumerate() {
            classes.entry(col[..step].to_vec()).or_default().push(c);
        }
        let mut next = cols.clone();
        for positions in classes.values() {
            let mut members: Vec<&Vec<i64>> = positions.iter().map(|&c| &cols[c]).collect();
            members.sort_by(|u, v| v[step].cmp(&u[step]));
            for (&pos, member) in positions.iter().zip(members) {
                next[pos] = member.clone();
            }
        }
        cols = next;
    }
    let mut rows = vec![vec![0; n]; n];
    for (k, &r) in order.iter().enumerate() {
        for c in 0..n {
            rows[r][c] = cols[c][k];
        }
    }
    EmbeddingMatrix { rows, b: a.b }
}
