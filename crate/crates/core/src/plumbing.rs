//! The linear plumbing for `-p/q` surgery on the unknot.
//!
//! Vertices `v_1, ..., v_l` carry weights `-a_i` from the HJ word of the
//! slope and `Q` is the tridiagonal intersection matrix. Characteristic
//! covectors are stored by their values `<K, [v_i]>`. Vertex indices in this
//! API are zero-based: index `0` is `v_1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::numeric::{self, Rational, SurgerySlope};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlumbingMatrix {
    weights: Vec<i64>,
    q: IntMatrix,
}

impl PlumbingMatrix {
    /// Builds `Q` from an HJ word and checks that it is negative definite.
    pub fn from_word(word: &[i64]) -> Result<Self> {
        let len = word.len();
        let mut q = vec![vec![0; len]; len];
        for (i, &a) in word.iter().enumerate() {
            q[i][i] = -a;
            if i + 1 < len {
                q[i][i + 1] = 1;
                q[i + 1][i] = 1;
            }
        }
        // Leading minors of a tridiagonal matrix: D_k = -a_k D_{k-1} - D_{k-2}.
        let (mut prev, mut cur) = (0i128, 1i128);
        for (k, &a) in word.iter().enumerate() {
            let next = -(a as i128) * cur - prev;
            let want_negative = k % 2 == 0;
            if next == 0 || (next < 0) != want_negative {
                return Err(Error::NotNegativeDefinite(format!(
                    "leading minor of order {} is {next}",
                    k + 1
                )));
            }
            prev = cur;
            cur = next;
        }
        Ok(Self {
            weights: word.to_vec(),
            q,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The word `a_i`; vertex weights are `-a_i`.
    pub fn word(&self) -> &[i64] {
        &self.weights
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.q
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.q[i]
    }

    pub fn determinant(&self) -> BigInt {
        linalg::determinant(&self.q)
    }

    /// Solves `Q x = b` with the tridiagonal (Thomas) elimination.
    pub fn solve(&self, b: &[i64]) -> Result<Vec<Rational>> {
        let len = self.len();
        if b.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "covector has {} entries, graph has {len} vertices",
                b.len()
            )));
        }
        let one = Rational::from_integer(1.into());
        let mut c: Vec<Rational> = Vec::with_capacity(len);
        let mut d: Vec<Rational> = Vec::with_capacity(len);
        for i in 0..len {
            let diag = Rational::from_integer((-self.weights[i]).into());
            let rhs = Rational::from_integer(b[i].into());
            let (denom, rhs) = if i == 0 {
                (diag, rhs)
            } else {
                (diag - &c[i - 1], rhs - &d[i - 1])
            };
            if denom.is_zero() {
                return Err(Error::Singular);
            }
            c.push(&one / &denom);
            d.push(rhs / denom);
        }
        let mut x = vec![Rational::zero(); len];
        for i in (0..len).rev() {
            x[i] = if i + 1 == len {
                d[i].clone()
            } else {
                &d[i] - &c[i] * &x[i + 1]
            };
        }
        Ok(x)
    }
}

pub fn build_matrix(s: &SurgerySlope) -> PlumbingMatrix {
    PlumbingMatrix::from_word(s.word()).expect("the plumbing of a valid slope is negative definite")
}

/// A characteristic covector, `k_i = <K, [v_i]>` with `k_i = a_i (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharVector(Vec<i64>);

impl CharVector {
    pub fn new(coords: Vec<i64>, word: &[i64]) -> Result<Self> {
        if coords.len() != word.len() {
            return Err(Error::DimensionMismatch(format!(
                "covector has {} entries, graph has {} vertices",
                coords.len(),
                word.len()
            )));
        }
        if let Some(i) = (0..coords.len()).find(|&i| (coords[i] - word[i]).rem_euclid(2) != 0) {
            return Err(Error::Parse(format!(
                "entry {} of {:?} has the wrong parity for weight -{}",
                i, coords, word[i]
            )));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.0[0]
    }

    pub fn tail(&self) -> &[i64] {
        &self.0[1..]
    }
}

impl fmt::Display for CharVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// `-a_i + 2 <= k_i <= a_i` on every vertex.
pub fn satisfies_initial_bounds(k: &[i64], word: &[i64]) -> bool {
    k.len() == word.len() && k.iter().zip(word).all(|(&x, &a)| -a + 2 <= x && x <= a)
}

/// `K + 2 PD[v_i]`, i.e. `K` plus twice row `i` of `Q`.
pub fn push_down(k: &CharVector, q: &PlumbingMatrix, i: usize) -> Result<CharVector> {
    if i >= q.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: q.len(),
        });
    }
    if k.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "covector has {} entries, graph has {} vertices",
            k.len(),
            q.len()
        )));
    }
    let coords = k.0.iter().zip(q.row(i)).map(|(x, r)| x + 2 * r).collect();
    Ok(CharVector(coords))
}

/// True when two peaks are separated only by entries equal to `a_m - 2`.
pub fn has_full_tank(k: &[i64], word: &[i64]) -> bool {
    let mut open = false;
    for (&x, &a) in k.iter().zip(word) {
        if x == a {
            if open {
                return true;
            }
            open = true;
        } else if x != a - 2 {
            open = false;
        }
    }
    false
}

/// True when some peak is preceded only by entries equal to `a_m - 2`.
pub fn is_left_full(tail: &[i64], tail_word: &[i64]) -> bool {
    first_left_full_peak(tail, tail_word).is_some()
}

fn first_left_full_peak(k: &[i64], word: &[i64]) -> Option<usize> {
    for (i, (&x, &a)) in k.iter().zip(word).enumerate() {
        if x == a {
            return Some(i);
        }
        if x != a - 2 {
            return None;
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathClass {
    Maximising,
    NonMaximising,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathOutcome {
    pub class: PathClass,
    /// Vertices pushed down, in order.
    pub trace: Vec<usize>,
    pub end: CharVector,
}

/// Runs the push-down iteration from `k`, always pushing at the lowest peak.
pub fn run_path(k: &CharVector, q: &PlumbingMatrix) -> Result<PathOutcome> {
    let word = q.word();
    let guard = step_guard(word);
    let mut cur = k.clone();
    let mut trace = Vec::new();
    loop {
        if cur.0.iter().zip(word).any(|(&x, &a)| x > a) {
            return Ok(PathOutcome {
                class: PathClass::NonMaximising,
                trace,
                end: cur,
            });
        }
        match cur.0.iter().zip(word).position(|(&x, &a)| x == a) {
            Some(i) => {
                if trace.len() as u128 >= guard {
                    return Err(Error::Internal(format!(
                        "push-down path from {k} exceeded {guard} steps"
                    )));
                }
                cur = push_down(&cur, q, i)?;
                trace.push(i);
            }
            None => {
                return Ok(PathOutcome {
                    class: PathClass::Maximising,
                    trace,
                    end: cur,
                })
            }
        }
    }
}

pub fn classify_path(k: &CharVector, q: &PlumbingMatrix) -> Result<PathClass> {
    run_path(k, q).map(|o| o.class)
}

// l^2 * p * prod(a_i), where p is the numerator of the word. Observed
// paths are at most l^2 long; this only catches runaway loops.
fn step_guard(word: &[i64]) -> u128 {
    let (mut prev, mut cur) = (0u128, 1u128);
    let mut prod = 1u128;
    for &a in word {
        let next = (a as u128 * cur).saturating_sub(prev);
        prev = cur;
        cur = next;
        prod = prod.saturating_mul(a as u128);
    }
    let l = word.len() as u128;
    cur.max(1).saturating_mul(prod).saturating_mul(l * l).max(1)
}

/// Odometer over all covectors satisfying the initial bounds, in
/// lexicographic order.
pub struct InitialCovectors<'a> {
    word: &'a [i64],
    next: Option<Vec<i64>>,
}

impl<'a> InitialCovectors<'a> {
    pub fn new(word: &'a [i64]) -> Self {
        let start = word.iter().map(|&a| -a + 2).collect();
        Self {
            word,
            next: Some(start),
        }
    }
}

impl Iterator for InitialCovectors<'_> {
    type Item = CharVector;

    fn next(&mut self) -> Option<CharVector> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if succ[pos] + 2 <= self.word[pos] {
                succ[pos] += 2;
                self.next = Some(succ);
                break;
            }
            succ[pos] = -self.word[pos] + 2;
        }
        Some(CharVector(cur))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FamilyKind {
    Initial,
    K,
    KPrime,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovectorFamily {
    pub slope: SurgerySlope,
    pub kind: FamilyKind,
    pub members: Vec<CharVector>,
}

impl CovectorFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Multiplicity of each first coordinate `<K, [v_1]>`.
    pub fn first_coordinate_census(&self) -> BTreeMap<i64, usize> {
        let mut census = BTreeMap::new();
        for k in &self.members {
            *census.entry(k.first()).or_insert(0) += 1;
        }
        census
    }
}

pub fn enumerate_initial(s: &SurgerySlope) -> CovectorFamily {
    CovectorFamily {
        slope: s.clone(),
        kind: FamilyKind::Initial,
        members: InitialCovectors::new(s.word()).collect(),
    }
}

/// All covectors within the initial bounds that contain no full tank, in
/// lexicographic order. Prefixes containing a tank are pruned, so the cost is
/// linear in `p * l` rather than in `prod(a_i)`.
pub fn enumerate_k(s: &SurgerySlope) -> CovectorFamily {
    fn extend(word: &[i64], prefix: &mut Vec<i64>, open: bool, out: &mut Vec<CharVector>) {
        let pos = prefix.len();
        if pos == word.len() {
            out.push(CharVector(prefix.clone()));
            return;
        }
        let a = word[pos];
        let mut x = -a + 2;
        while x <= a {
            let next_open = if x == a {
                if open {
                    x += 2;
                    continue;
                }
                true
            } else {
                open && x == a - 2
            };
            prefix.push(x);
            extend(word, prefix, next_open, out);
            prefix.pop();
            x += 2;
        }
    }
    let mut members = Vec::with_capacity(s.p() as usize);
    extend(
        s.word(),
        &mut Vec::with_capacity(s.len()),
        false,
        &mut members,
    );
    CovectorFamily {
        slope: s.clone(),
        kind: FamilyKind::K,
        members,
    }
}

/// Nudges each `K` with `-1 <= k_1 < n` and left-full tail up by pushing down
/// from the first tail peak `v_k` back to `v_2`, giving
/// `K + 2 (PD[v_2] + ... + PD[v_k])`. Members stay aligned with
/// [`enumerate_k`]: member `i` here is equivalent to member `i` there.
pub fn enumerate_k_prime(s: &SurgerySlope) -> CovectorFamily {
    let q = build_matrix(s);
    let word = s.word();
    let n = s.n() as i64;
    let members = enumerate_k(s)
        .members
        .into_iter()
        .map(|k| {
            if k.len() < 2 || k.first() < -1 || k.first() >= n {
                return k;
            }
            match first_left_full_peak(k.tail(), &word[1..]) {
                Some(peak) => {
                    let mut cur = k;
                    for v in (1..=peak + 1).rev() {
                        cur = push_down(&cur, &q, v).expect("index in range");
                    }
                    cur
                }
                None => k,
            }
        })
        .collect();
    CovectorFamily {
        slope: s.clone(),
        kind: FamilyKind::KPrime,
        members,
    }
}

/// `K Q^{-1} K^t`, computed by an exact solve.
pub fn square(k: &CharVector, q: &PlumbingMatrix) -> Result<Rational> {
    let x = q.solve(&k.0)?;
    Ok(k.0
        .iter()
        .zip(&x)
        .map(|(&ki, xi)| xi * Rational::from_integer(ki.into()))
        .sum())
}

/// Correction terms of `S^3_{-p/q}(U)`, one per member of the family `K`,
/// as `d = (K^2 + l) / 4`.
pub fn lens_d_invariants(s: &SurgerySlope) -> Vec<(CharVector, Rational)> {
    let q = build_matrix(s);
    let len = Rational::from_integer((s.len() as i64).into());
    let four = Rational::from_integer(4.into());
    enumerate_k(s)
        .members
        .into_iter()
        .map(|k| {
            let sq = square(&k, &q).expect("plumbing matrix is nonsingular");
            let d = (sq + &len) / &four;
            (k, d)
        })
        .collect()
}

/// The recursive lens-space correction term, in the orientation where the
/// lens space is `-p/q` surgery on the unknot:
/// `d(p, q, i) = (pq - (2i + 1 - p - q)^2) / 4pq - d(q, p mod q, i mod q)`.
pub fn lens_d_recursion(p: u64, q: u64, i: u64) -> Result<Rational> {
    if p == 0 || q == 0 || p.gcd(&q) != 1 {
        return Err(Error::InvalidSlope(format!("{p}/{q}")));
    }
    if i >= p {
        return Err(Error::BadLensIndex { p, index: i });
    }
    let (mut p, mut q, mut i) = (p as i128, (q % p) as i128, i as i128);
    let mut total = Rational::zero();
    let mut sign = 1i64;
    while p > 1 {
        let num = p * q - (2 * i + 1 - p - q).pow(2);
        let term = Rational::new(BigInt::from(num), BigInt::from(4 * p * q));
        if sign > 0 {
            total += term;
        } else {
            total -= term;
        }
        sign = -sign;
        let r = p % q;
        i %= q;
        p = q;
        q = r;
    }
    Ok(total)
}

/// Decides `K ~ K'` by testing whether `K - K'` lies in twice the integer
/// row span of `Q`.
pub fn equivalent(k1: &CharVector, k2: &CharVector, q: &PlumbingMatrix) -> Result<bool> {
    if k1.len() != k2.len() {
        return Err(Error::DimensionMismatch(
            "covectors of different lengths".into(),
        ));
    }
    let half_diff: Vec<i64> = k1.0.iter().zip(&k2.0).map(|(a, b)| (a - b) / 2).collect();
    let x = q.solve(&half_diff)?;
    Ok(x.iter().all(numeric::is_integral))
}

/// Labels the class of a characteristic covector `K`, i.e. the class of
/// `(K - a) / 2` in `Z^l / Q Z^l` (cyclic of order `p`), by pairing with the
/// last row of `adj(Q)`, whose first entry is `+-1`.
#[derive(Debug, Clone)]
pub struct ClassIndexer {
    weights: Vec<i128>,
    modulus: i128,
    word: Vec<i64>,
}

impl ClassIndexer {
    pub fn new(q: &PlumbingMatrix) -> Self {
        let len = q.len();
        let det = q.determinant();
        let mut e = vec![0; len];
        e[len - 1] = 1;
        let col = q.solve(&e).expect("plumbing matrix is nonsingular");
        let modulus = det.magnitude().to_i128().expect("determinant fits in i128");
        let weights = col
            .iter()
            .map(|x| {
                let v = x * Rational::from_integer(det.clone());
                debug_assert!(numeric::is_integral(&v));
                v.to_integer()
                    .mod_floor(&BigInt::from(modulus))
                    .to_i128()
                    .expect("reduced weight fits in i128")
            })
            .collect();
        Self {
            weights,
            modulus,
            word: q.word().to_vec(),
        }
    }

    pub fn index(&self, k: &CharVector) -> u64 {
        let s: i128 =
            k.0.iter()
                .zip(&self.word)
                .zip(&self.weights)
                .map(|((&x, &a), &w)| {
                    let half = ((x - a) / 2) as i128;
                    half.rem_euclid(self.modulus) * w % self.modulus
                })
                .sum();
        s.rem_euclid(self.modulus) as u64
    }
}

/// Integral surgery label for a first coordinate `j`: `(j + n) / 2`, except
/// `j = n`, which maps to `0`.
pub fn integral_label(j: i64, n: u64) -> u64 {
    let n = n as i64;
    if j == n {
        0
    } else {
        ((j + n) / 2) as u64
    }
}

/// Sizes of the fibres of the family `K'` over the `n` integral labels.
pub fn integral_fibres(s: &SurgerySlope) -> Vec<usize> {
    let mut fibres = vec![0; s.n() as usize];
    for k in enumerate_k_prime(s).members {
        fibres[integral_label(k.first(), s.n()) as usize] += 1;
    }
    fibres
}

/// The first coordinate carrying `q - r` members of `K'`: `-1` for odd `n`,
/// `0` for even `n`.
pub fn exceptional_first_coordinate(n: u64) -> i64 {
    if n % 2 == 1 {
        -1
    } else {
        0
    }
}
