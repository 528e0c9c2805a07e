//! Slow, independent reference implementations used to cross-check the
//! fast paths in tests and in the self-test suite.

use std::collections::HashMap;

use crate::embedding::{verify_embedding, EmbeddingMatrix, FormBlock};
use crate::linalg::dot;
use crate::numeric::SurgerySlope;
use crate::plumbing::{has_full_tank, CharVector, InitialCovectors};

/// Subset-sum definition of a changemaker set: every integer in
/// `0..=sum` is the sum of some subset.
pub fn subset_sums_cover(values: &[u64]) -> bool {
    let total: u64 = values.iter().sum();
    let mut reachable = vec![false; total as usize + 1];
    for mask in 0u32..(1 << values.len()) {
        let s: u64 = values
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| v)
            .sum();
        reachable[s as usize] = true;
    }
    reachable.into_iter().all(|r| r)
}

/// The family `K` by filtering every covector in the initial bounds.
pub fn brute_force_k(s: &SurgerySlope) -> Vec<CharVector> {
    InitialCovectors::new(s.word())
        .filter(|k| !has_full_tank(k.coords(), s.word()))
        .collect()
}

/// All vectors in `Z^n` of squared norm `norm`, in no particular order.
pub fn vectors_of_norm(n: usize, norm: i64) -> Vec<Vec<i64>> {
    fn extend(n: usize, rem: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == n {
            if rem == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let mut v = 0;
        while v * v <= rem {
            for x in if v == 0 { vec![0] } else { vec![v, -v] } {
                prefix.push(x);
                extend(n, rem - v * v, prefix, out);
                prefix.pop();
            }
            v += 1;
        }
    }
    let mut out = Vec::new();
    extend(n, norm, &mut Vec::new(), &mut out);
    out
}

/// Enumerates integer matrices row by row in output order, each row drawn
/// from every vector of the required norm. Choosing a row filters the
/// candidate lists of all later rows down to vectors with the required
/// inner product, and a branch dies as soon as some list is empty. Only the
/// first row is reduced by symmetry (taken non-negative and
/// non-increasing). Every complete matrix is handed to
/// [`verify_embedding`]; the first that passes is returned.
pub fn naive_embedding(blocks: &FormBlock) -> Option<EmbeddingMatrix> {
    let n = blocks.rank();
    let target: Vec<Vec<i64>> = blocks
        .direct_sum()
        .into_iter()
        .map(|r| r.into_iter().map(|x| -x).collect())
        .collect();
    let mut shells: HashMap<i64, Vec<Vec<i64>>> = HashMap::new();
    for (i, row) in target.iter().enumerate() {
        shells
            .entry(row[i])
            .or_insert_with(|| vectors_of_norm(n, row[i]));
    }
    let mut candidates: Vec<Vec<&[i64]>> = (0..n)
        .map(|i| shells[&target[i][i]].iter().map(Vec::as_slice).collect())
        .collect();
    candidates[0].retain(|v| v.iter().all(|&x| x >= 0) && v.windows(2).all(|w| w[0] >= w[1]));

    fn go(
        k: usize,
        rows: &mut Vec<Vec<i64>>,
        candidates: &[Vec<&[i64]>],
        target: &[Vec<i64>],
        blocks: &FormBlock,
    ) -> Option<EmbeddingMatrix> {
        let n = target.len();
        if k == n {
            let a = EmbeddingMatrix::new(rows.clone(), blocks.b()).ok()?;
            let ok = verify_embedding(&a, blocks).ok()?.ok();
            return ok.then_some(a);
        }
        'next: for v in &candidates[k] {
            let mut narrowed = candidates.to_vec();
            for m in k + 1..n {
                narrowed[m].retain(|u| dot(u, v) == target[m][k]);
                if narrowed[m].is_empty() {
                    continue 'next;
                }
            }
            rows.push(v.to_vec());
            if let Some(a) = go(k + 1, rows, &narrowed, target, blocks) {
                return Some(a);
            }
            rows.pop();
        }
        None
    }

    go(0, &mut Vec::with_capacity(n), &candidates, &target, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::hj_expand;
    use crate::plumbing::enumerate_k;

    #[test]
    fn subset_sum_examples() {
        assert!(subset_sums_cover(&[]));
        assert!(subset_sums_cover(&[1, 1, 2, 4]));
        assert!(!subset_sums_cover(&[1, 3]));
    }

    #[test]
    fn norm_shells() {
        assert_eq!(vectors_of_norm(3, 1).len(), 6);
        assert_eq!(vectors_of_norm(4, 2).len(), 24);
        assert_eq!(vectors_of_norm(2, 0), vec![vec![0, 0]]);
    }

    #[test]
    fn brute_force_k_matches_pruned_enumeration() {
        for (p, q) in [(7, 3), (13, 5), (5, 8), (9, 1)] {
            let s = hj_expand(p, q).unwrap();
            assert_eq!(brute_force_k(&s), enumerate_k(&s).members);
        }
    }

    #[test]
    fn naive_embedding_examples() {
        let b = FormBlock::new(vec![vec![-3]], &hj_expand(3, 2).unwrap()).unwrap();
        assert!(naive_embedding(&b).is_some());
        let b = FormBlock::new(vec![vec![-2]], &hj_expand(3, 2).unwrap()).unwrap();
        assert!(naive_embedding(&b).is_none());
    }
}
