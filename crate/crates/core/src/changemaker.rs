//! Changemaker sets: non-negative integers whose subset sums cover every
//! value from zero to their total.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A changemaker vector, stored sorted non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChangemakerVector(Vec<u64>);

impl ChangemakerVector {
    pub fn new(values: &[i64]) -> Result<Self> {
        if !is_changemaker(values)? {
            return Err(Error::Parse(format!("{values:?} is not a changemaker set")));
        }
        let mut v: Vec<u64> = values.iter().map(|&x| x as u64).collect();
        v.sort_unstable();
        Ok(Self(v))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn norm(&self) -> u64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Sorted criterion: after sorting, each entry is at most one more than the
/// sum of the entries before it.
pub fn is_changemaker(values: &[i64]) -> Result<bool> {
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, &x)| x < 0) {
        return Err(Error::NegativeEntry { index, value });
    }
    let mut sorted: Vec<u64> = values.iter().map(|&x| x as u64).collect();
    sorted.sort_unstable();
    let mut reach = 0u64;
    for x in sorted {
        if x > reach + 1 {
            return Ok(false);
        }
        reach += x;
    }
    Ok(true)
}

/// All changemaker vectors with positive entries, `sum sigma_i^2 = norm` and
/// at most `max_len` entries, in lexicographic order.
pub fn enumerate_changemakers(norm: u64, max_len: usize) -> Vec<ChangemakerVector> {
    fn extend(
        remaining: u64,
        min_next: u64,
        reach: u64,
        max_len: usize,
        prefix: &mut Vec<u64>,
        out: &mut Vec<ChangemakerVector>,
    ) {
        if remaining == 0 {
            out.push(ChangemakerVector(prefix.clone()));
            return;
        }
        if prefix.len() == max_len {
            return;
        }
        let mut x = min_next;
        while x <= reach + 1 && x * x <= remaining {
            prefix.push(x);
            extend(remaining - x * x, x, reach + x, max_len, prefix, out);
            prefix.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    extend(norm, 1, 0, max_len, &mut Vec::new(), &mut out);
    out
}
