//! Exhaustive backtracking search for changemaker embeddings.
//!
//! Rows are built in the order `x, y_2, ..., y_l`, then the rows for `Q_X`.
//! `x` is drawn from the changemaker candidates; every later row is filled
//! column by column. Columns that agree on all earlier rows are
//! interchangeable, so within each such class the new entries are taken
//! non-increasing, and columns that are zero so far only take non-negative
//! entries. Partial inner products are pruned by Cauchy–Schwarz against the
//! norm still to be placed.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{verify_embedding, EmbeddingMatrix, FormBlock};
use crate::changemaker::{enumerate_changemakers, ChangemakerVector};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_RANK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest ambient rank `b + l` the search accepts.
    pub max_rank: usize,
    /// Worker threads; results do not depend on this.
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_rank: DEFAULT_MAX_RANK,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub certificate: Option<EmbeddingMatrix>,
    pub sigma: Option<ChangemakerVector>,
    /// Search nodes visited up to and including the successful `x`
    /// candidate, or over all candidates when there is no embedding.
    pub nodes: u64,
}

impl SearchOutcome {
    pub fn embeddable(&self) -> bool {
        self.certificate.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    X,
    /// `y_i`, `i >= 2`.
    Y(usize),
    Qx,
}

fn isqrt(v: i64) -> i64 {
    let mut r = (v as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// `x` candidates as rows of length `n`, entries sorted non-increasing.
fn x_candidates(blocks: &FormBlock, n: usize) -> Vec<Vec<i64>> {
    let slope = blocks.slope();
    let (norm, extra) = if slope.q() == 1 {
        (slope.p(), 0)
    } else {
        (slope.n() - 1, 1)
    };
    if n < extra {
        return Vec::new();
    }
    enumerate_changemakers(norm, n - extra)
        .into_iter()
        .map(|sigma| {
            let mut entries: Vec<i64> = sigma.values().iter().map(|&v| v as i64).collect();
            if extra == 1 {
                entries.push(1);
            }
            entries.sort_unstable_by(|a, b| b.cmp(a));
            entries.resize(n, 0);
            entries
        })
        .collect()
}

/// Per-row data fixed before the row is filled.
struct RowContext {
    kind: RowKind,
    bound: i64,
    prev_in_class: Vec<Option<usize>>,
    fresh: Vec<bool>,
    /// For `y` rows: `Some(s)` means the entry must be `0` or `s`, `None`
    /// means it must be `0`; columns free of earlier rows are unrestricted.
    allowed: Vec<Option<Option<i64>>>,
    /// `suffix[m][c]`: squared norm of earlier row `m` over columns `c..`.
    suffix: Vec<Vec<i64>>,
}

struct Searcher<'a> {
    n: usize,
    /// Positive definite target Gram matrix in search order.
    target: &'a [Vec<i64>],
    kinds: &'a [RowKind],
    rows: Vec<Vec<i64>>,
    nodes: u64,
    cancelled: &'a dyn Fn() -> bool,
}

impl Searcher<'_> {
    fn context(&self, k: usize) -> RowContext {
        let n = self.n;
        let kind = self.kinds[k];
        let history = |c: usize| -> Vec<i64> { self.rows.iter().map(|r| r[c]).collect() };
        let mut prev_in_class = vec![None; n];
        let mut last: HashMap<Vec<i64>, usize> = HashMap::new();
        for (c, slot) in prev_in_class.iter_mut().enumerate() {
            *slot = last.insert(history(c), c);
        }
        let fresh = (0..n)
            .map(|c| self.rows.iter().all(|r| r[c] == 0))
            .collect();
        let allowed = match kind {
            RowKind::Y(i) => {
                let linked = &self.rows[i - 2];
                (0..n)
                    .map(|c| {
                        if linked[c] != 0 {
                            Some((linked[c].abs() == 1).then_some(-linked[c]))
                        } else if self.rows.iter().any(|r| r[c] != 0) {
                            Some(None)
                        } else {
                            None
                        }
                    })
                    .collect()
            }
            _ => vec![None; n],
        };
        let norm = self.target[k][k];
        let bound = match kind {
            RowKind::Y(_) => 1,
            _ => isqrt(norm),
        };
        let suffix = self
            .rows
            .iter()
            .map(|r| {
                let mut s = vec![0; n + 1];
                for c in (0..n).rev() {
                    s[c] = s[c + 1] + r[c] * r[c];
                }
                s
            })
            .collect();
        RowContext {
            kind,
            bound,
            prev_in_class,
            fresh,
            allowed,
            suffix,
        }
    }

    /// Fills rows `k..` and returns whether a full matrix was found.
    fn next_row(&mut self, k: usize) -> bool {
        if k == self.n {
            return true;
        }
        let ctx = self.context(k);
        let mut row = vec![0; self.n];
        let mut partial = vec![0; k];
        self.fill(k, 0, &ctx, &mut row, self.target[k][k], &mut partial, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &mut self,
        k: usize,
        c: usize,
        ctx: &RowContext,
        row: &mut Vec<i64>,
        rem: i64,
        partial: &mut Vec<i64>,
        overlap: usize,
    ) -> bool {
        if c == self.n {
            let overlap_ok = !matches!(ctx.kind, RowKind::Y(_)) || overlap == 1;
            if rem != 0 || !overlap_ok || (0..k).any(|m| partial[m] != self.target[k][m]) {
                return false;
            }
            self.rows.push(row.clone());
            if self.next_row(k + 1) {
                return true;
            }
            self.rows.pop();
            return false;
        }
        if (self.cancelled)() {
            return false;
        }
        let mut hi = ctx.bound.min(isqrt(rem));
        if let Some(p) = ctx.prev_in_class[c] {
            hi = hi.min(row[p]);
        }
        let lo = if ctx.fresh[c] { 0 } else { -ctx.bound };
        let remaining_cols = (self.n - c - 1) as i64;
        for v in (lo..=hi).rev() {
            let mut next_overlap = overlap;
            match ctx.allowed[c] {
                Some(None) if v != 0 => continue,
                Some(Some(s)) if v != 0 => {
                    if v != s || overlap == 1 {
                        continue;
                    }
                    next_overlap += 1;
                }
                _ => {}
            }
            let left = rem - v * v;
            if left < 0 || left > remaining_cols * ctx.bound * ctx.bound {
                continue;
            }
            self.nodes += 1;
            let mut feasible = true;
            for (m, acc) in partial.iter_mut().enumerate() {
                *acc += v * self.rows[m][c];
                let d = self.target[k][m] - *acc;
                if d * d > left * ctx.suffix[m][c + 1] {
                    feasible = false;
                }
            }
            if feasible {
                row[c] = v;
                if self.fill(k, c + 1, ctx, row, left, partial, next_overlap) {
                    return true;
                }
                row[c] = 0;
            }
            for (m, acc) in partial.iter_mut().enumerate() {
                *acc -= v * self.rows[m][c];
            }
        }
        false
    }
}

/// Searches for an embedding of `Q_X ⊕ Q_W` whose `W` rows have changemaker
/// structure. The search is exhaustive, so `None` means no embedding exists.
pub fn search_embedding(blocks: &FormBlock, opts: &SearchOptions) -> Result<SearchOutcome> {
    let n = blocks.rank();
    if n > opts.max_rank {
        return Err(Error::SearchBoundExceeded {
            rank: n,
            bound: opts.max_rank,
        });
    }
    let (b, l) = (blocks.b(), blocks.l());
    let order: Vec<usize> = (b..n).chain(0..b).collect();
    let sum = blocks.direct_sum();
    let target: Vec<Vec<i64>> = order
        .iter()
        .map(|&i| order.iter().map(|&j| -sum[i][j]).collect())
        .collect();
    let kinds: Vec<RowKind> = (0..n)
        .map(|k| match k {
            0 => RowKind::X,
            k if k < l => RowKind::Y(k + 1),
            _ => RowKind::Qx,
        })
        .collect();
    let candidates = x_candidates(blocks, n);
    let best = AtomicUsize::new(usize::MAX);
    let run = |(idx, x): (usize, &Vec<i64>)| -> (Option<Vec<Vec<i64>>>, u64) {
        if best.load(Ordering::Relaxed) < idx {
            return (None, 0);
        }
        let cancelled = || best.load(Ordering::Relaxed) < idx;
        let mut s = Searcher {
            n,
            target: &target,
            kinds: &kinds,
            rows: vec![x.clone()],
            nodes: 1,
            cancelled: &cancelled,
        };
        if s.next_row(1) {
            best.fetch_min(idx, Ordering::Relaxed);
            (Some(s.rows), s.nodes)
        } else {
            (None, s.nodes)
        }
    };
    let results: Vec<(Option<Vec<Vec<i64>>>, u64)> = if opts.workers <= 1 {
        let mut out = Vec::new();
        for item in candidates.iter().enumerate() {
            let r = run(item);
            let done = r.0.is_some();
            out.push(r);
            if done {
                break;
            }
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| candidates.par_iter().enumerate().map(run).collect())
    };
    let winner = results.iter().position(|r| r.0.is_some());
    let upto = winner.map_or(results.len(), |w| w + 1);
    let nodes = results[..upto].iter().map(|r| r.1).sum();
    let Some(w) = winner else {
        return Ok(SearchOutcome {
            certificate: None,
            sigma: None,
            nodes,
        });
    };
    let found = results[w].0.as_ref().expect("winner has rows");
    let mut rows = vec![Vec::new(); n];
    for (k, &i) in order.iter().enumerate() {
        rows[i] = found[k].clone();
    }
    let certificate = EmbeddingMatrix::new(rows, b)?;
    let check = verify_embedding(&certificate, blocks)?;
    if let Some(v) = check.violation {
        return Err(Error::Internal(format!(
            "search produced an invalid embedding: {v}"
        )));
    }
    Ok(SearchOutcome {
        certificate: Some(certificate),
        sigma: check.sigma,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::normalize;
    use crate::numeric::hj_expand;

    fn blocks(qx: Vec<Vec<i64>>, p: u64, q: u64) -> FormBlock {
        FormBlock::new(qx, &hj_expand(p, q).unwrap()).unwrap()
    }

    #[test]
    fn three_halves_examples() {
        let out =
            search_embedding(&blocks(vec![vec![-3]], 3, 2), &SearchOptions::default()).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(
            cert.rows(),
            &vec![vec![1, -1, -1], vec![1, 1, 0], vec![0, -1, 1]]
        );
        assert_eq!(out.sigma.unwrap().values(), &[1]);
        let out =
            search_embedding(&blocks(vec![vec![-2]], 3, 2), &SearchOptions::default()).unwrap();
        assert!(out.certificate.is_none());
        assert!(out.nodes > 0);
    }

    #[test]
    fn trivial_and_diagonal_cases() {
        let opts = SearchOptions::default();
        let out = search_embedding(&blocks(vec![], 1, 1), &opts).unwrap();
        assert_eq!(out.certificate.unwrap().rows(), &vec![vec![1]]);
        let out = search_embedding(&blocks(vec![vec![-1]], 1, 1), &opts).unwrap();
        assert!(out.embeddable());
        let out = search_embedding(&blocks(vec![vec![-1]], 2, 1), &opts).unwrap();
        assert!(!out.embeddable());
    }

    #[test]
    fn certificates_are_normal_forms() {
        let opts = SearchOptions::default();
        for (qx, p, q) in [
            (vec![vec![-3]], 3, 2),
            (vec![vec![-2, 1], vec![1, -3]], 7, 3),
            (vec![vec![-5]], 5, 1),
        ] {
            if let Some(cert) = search_embedding(&blocks(qx, p, q), &opts)
                .unwrap()
                .certificate
            {
                assert_eq!(normalize(&cert), cert);
            }
        }
    }

    #[test]
    fn rank_bound_is_enforced() {
        let opts = SearchOptions {
            max_rank: 2,
            workers: 1,
        };
        assert_eq!(
            search_embedding(&blocks(vec![vec![-3]], 3, 2), &opts),
            Err(Error::SearchBoundExceeded { rank: 3, bound: 2 })
        );
    }

    #[test]
    fn worker_count_does_not_change_the_answer() {
        let b = blocks(vec![vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -4]], 11, 4);
        let one = search_embedding(
            &b,
            &SearchOptions {
                max_rank: 16,
                workers: 1,
            },
        )
        .unwrap();
        let four = search_embedding(
            &b,
            &SearchOptions {
                max_rank: 16,
                workers: 4,
            },
        )
        .unwrap();
        assert_eq!(one, four);
    }
}
