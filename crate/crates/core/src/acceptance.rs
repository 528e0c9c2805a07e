//! The self-test suite: each criterion cross-checks a fast path against an
//! independent oracle over a fixed, exhaustive or seeded-random domain.

use std::fmt;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::changemaker::is_changemaker;
use crate::deficiency::{
    deficiency_rational, sum_identity_check, symmetry_check, validate_vh, vanishing_hypothesis,
    CheckedKnotData, Hypothesis, KnotDData,
};
use crate::embedding::{obstruct, search_embedding, FormBlock, SearchOptions, Verdict};
use crate::linalg::IntMatrix;
use crate::numeric::{hj_expand, slopes_in, SurgerySlope};
use crate::oracles::{naive_embedding, subset_sums_cover};
use crate::plumbing::{
    build_matrix, classify_path, enumerate_k, enumerate_k_prime, exceptional_first_coordinate,
    has_full_tank, lens_d_invariants, lens_d_recursion, ClassIndexer, InitialCovectors, PathClass,
};

/// Seed for the random knot-data corpus.
pub const CORPUS_SEED: u64 = 0x5eed_d1ff;
pub const CORPUS_SIZE: usize = 200;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({} ms, budget {} ms)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed_ms,
            self.budget_ms
        )
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget: Duration,
    check: fn() -> Result<String, String>,
}

impl Criterion {
    /// Runs the check; a pass also requires finishing within the budget.
    pub fn run(&self) -> CriterionReport {
        let start = Instant::now();
        let outcome = (self.check)();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if pass && elapsed > self.budget {
            pass = false;
            detail = format!("{detail}; over time budget");
        }
        CriterionReport {
            id: self.id,
            name: self.name,
            pass,
            detail,
            elapsed_ms: elapsed.as_millis(),
            budget_ms: self.budget.as_millis(),
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            name: "covector count",
            budget: secs(60),
            check: covector_count,
        },
        Criterion {
            id: 2,
            name: "path classification",
            budget: secs(120),
            check: path_classification,
        },
        Criterion {
            id: 3,
            name: "d-invariant oracle",
            budget: secs(60),
            check: d_invariant_oracle,
        },
        Criterion {
            id: 4,
            name: "deficiency sum identity",
            budget: secs(30),
            check: sum_identity,
        },
        Criterion {
            id: 5,
            name: "deficiency multiset symmetry",
            budget: secs(30),
            check: multiset_symmetry,
        },
        Criterion {
            id: 6,
            name: "K' fibre census",
            budget: secs(60),
            check: fibre_census,
        },
        Criterion {
            id: 7,
            name: "changemaker equivalence",
            budget: secs(60),
            check: changemaker_equivalence,
        },
        Criterion {
            id: 8,
            name: "embedding end-to-end",
            budget: secs(120),
            check: embedding_end_to_end,
        },
        Criterion {
            id: 9,
            name: "unknot sanity",
            budget: secs(60),
            check: unknot_sanity,
        },
    ]
}

pub fn run_all() -> Vec<CriterionReport> {
    criteria().iter().map(Criterion::run).collect()
}

/// Coprime `p/q` with `p` in the range and `1 <= q <= 3p`.
pub fn slope_domain(p_range: std::ops::RangeInclusive<u64>) -> Vec<SurgerySlope> {
    slopes_in(p_range, |p| 3 * p)
}

fn word_product(s: &SurgerySlope) -> u128 {
    s.word().iter().map(|&a| a as u128).product()
}

fn first_failure<T: Sync>(
    items: &[T],
    check: impl Fn(&T) -> Option<String> + Sync + Send,
) -> Result<(), String> {
    match items.par_iter().find_map_first(check) {
        Some(msg) => Err(msg),
        None => Ok(()),
    }
}

fn covector_count() -> Result<String, String> {
    let slopes = slope_domain(2..=60);
    first_failure(&slopes, |s| {
        let count = enumerate_k(s).len();
        (count as u64 != s.p()).then(|| format!("{s}: |K| = {count}, expected {}", s.p()))
    })?;
    Ok(format!(
        "|K| = p for {} slopes (2 <= p <= 60, q <= 3p)",
        slopes.len()
    ))
}

pub const PATH_PRODUCT_BOUND: u128 = 100_000;

fn path_classification() -> Result<String, String> {
    let slopes: Vec<SurgerySlope> = slope_domain(1..=60)
        .into_iter()
        .filter(|s| word_product(s) <= PATH_PRODUCT_BOUND)
        .collect();
    let covectors: u128 = slopes.iter().map(word_product).sum();
    first_failure(&slopes, |s| {
        let q = build_matrix(s);
        for k in InitialCovectors::new(s.word()) {
            let class = match classify_path(&k, &q) {
                Ok(c) => c,
                Err(e) => return Some(format!("{s}, K = {k}: {e}")),
            };
            let maximising = class == PathClass::Maximising;
            if maximising == has_full_tank(k.coords(), s.word()) {
                return Some(format!(
                    "{s}, K = {k}: path is {class:?} but tank = {}",
                    !maximising
                ));
            }
        }
        None
    })?;
    Ok(format!(
        "{covectors} initial covectors over {} slopes (p <= 60, q <= 3p, prod a_i <= {PATH_PRODUCT_BOUND})",
        slopes.len()
    ))
}

fn d_invariant_oracle() -> Result<String, String> {
    let spot: Vec<String> = lens_d_invariants(&hj_expand(2, 1).expect("valid slope"))
        .iter()
        .map(|(_, d)| d.to_string())
        .collect();
    if spot != ["1/4", "-1/4"] {
        return Err(format!("2/1 gives {spot:?}, expected [1/4, -1/4]"));
    }
    let slopes = slope_domain(1..=50);
    first_failure(&slopes, |s| {
        let mut plumbing: Vec<_> = lens_d_invariants(s).into_iter().map(|(_, d)| d).collect();
        let recursion: Result<Vec<_>, _> = (0..s.p())
            .map(|i| lens_d_recursion(s.p(), s.q(), i))
            .collect();
        let mut recursion = match recursion {
            Ok(r) => r,
            Err(e) => return Some(format!("{s}: {e}")),
        };
        plumbing.sort();
        recursion.sort();
        (plumbing != recursion).then(|| format!("{s}: plumbing and recursion multisets differ"))
    })?;
    Ok(format!(
        "multisets agree on {} slopes (p <= 50, q <= 3p); 2/1 -> {{1/4, -1/4}}",
        slopes.len()
    ))
}

/// Seeded corpus of `(V, slope)` pairs: `V` of length 1..=8, entries in
/// 0..=10, sorted non-increasing; `p <= 80` and `q` coprime in `1..=2p`.
pub fn random_corpus() -> Vec<(CheckedKnotData, SurgerySlope)> {
    let mut rng = StdRng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|_| {
            let len = rng.gen_range(1..=8);
            let mut v: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=10)).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            let data = validate_vh(&KnotDData::from_v(v)).expect("sorted corpus is valid");
            let slope = loop {
                let p = rng.gen_range(1..=80);
                let q = rng.gen_range(1..=2 * p);
                if let Ok(s) = hj_expand(p, q) {
                    break s;
                }
            };
            (data, slope)
        })
        .collect()
}

fn sum_identity() -> Result<String, String> {
    let corpus = random_corpus();
    first_failure(&corpus, |(data, s)| {
        let check = sum_identity_check(data, s);
        (!check.holds).then(|| {
            format!(
                "V = {:?}, {s}: {} != {}",
                data.v_list(),
                check.lhs,
                check.rhs
            )
        })
    })?;
    Ok(format!("identity holds on {} seeded pairs", corpus.len()))
}

fn multiset_symmetry() -> Result<String, String> {
    let witness_data = validate_vh(&KnotDData::from_v(vec![1, 0])).expect("valid data");
    let witness_slope = hj_expand(7, 3).expect("valid slope");
    let mut values = deficiency_rational(&witness_data, &witness_slope).values;
    values.sort_unstable_by(|a, b| b.cmp(a));
    if values != [2, 2, 2, 0, 0, 0, 0] || !symmetry_check(&witness_data, &witness_slope).holds {
        return Err(format!("V = (1, 0), 7/3 gives {values:?}"));
    }
    let corpus = random_corpus();
    first_failure(&corpus, |(data, s)| {
        (!symmetry_check(data, s).holds)
            .then(|| format!("V = {:?}, {s}: multisets differ", data.v_list()))
    })?;
    Ok(format!(
        "symmetry holds on {} seeded pairs; V = (1, 0), 7/3 -> {{2,2,2,0,0,0,0}}",
        corpus.len()
    ))
}

fn fibre_census() -> Result<String, String> {
    let slopes = slope_domain(1..=60);
    first_failure(&slopes, |s| {
        let (n, q, r) = (s.n() as i64, s.q() as usize, s.r() as usize);
        let family = enumerate_k_prime(s);
        let exceptional = exceptional_first_coordinate(s.n());
        let expected: std::collections::BTreeMap<i64, usize> = (-n + 2..=n)
            .step_by(2)
            .map(|j| {
                (
                    j,
                    if (j - exceptional).rem_euclid(2 * n) == 0 {
                        q - r
                    } else {
                        q
                    },
                )
            })
            .filter(|&(_, c)| c > 0)
            .collect();
        let census = family.first_coordinate_census();
        if census != expected {
            return Some(format!("{s}: census {census:?}, expected {expected:?}"));
        }
        let indexer = ClassIndexer::new(&build_matrix(s));
        let k = enumerate_k(s);
        let shifted = k
            .members
            .iter()
            .zip(&family.members)
            .position(|(a, b)| indexer.index(a) != indexer.index(b));
        shifted.map(|i| format!("{s}: member {i} of K' left its class"))
    })?;
    Ok(format!(
        "census matches on {} slopes (p <= 60, q <= 3p)",
        slopes.len()
    ))
}

fn changemaker_equivalence() -> Result<String, String> {
    fn sorted_vectors(len: usize, max: u64) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for v in &layer {
                let start = v.last().copied().unwrap_or(0);
                for x in start..=max {
                    let mut w: Vec<u64> = v.clone();
                    w.push(x);
                    next.push(w);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
    let vectors = sorted_vectors(8, 12);
    first_failure(&vectors, |v| {
        let signed: Vec<i64> = v.iter().map(|&x| x as i64).collect();
        let fast = is_changemaker(&signed).expect("entries are non-negative");
        (fast != subset_sums_cover(v)).then(|| format!("{v:?}: sorted criterion says {fast}"))
    })?;
    Ok(format!(
        "{} sorted vectors (length <= 8, entries <= 12) agree",
        vectors.len()
    ))
}

/// Linear-chain and diagonal `Q_X` of size `b` with diagonal entries in
/// `-4..=-1`: diagonals up to reordering, and chains with entries `<= -2`.
pub fn small_qx_family(b: usize) -> Vec<IntMatrix> {
    fn multisets(b: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
        if b == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for rest in multisets(b - 1, lo, hi) {
            let start = rest.last().copied().unwrap_or(lo);
            for x in start..=hi {
                let mut v = rest.clone();
                v.push(x);
                out.push(v);
            }
        }
        out
    }
    fn words(b: usize, choices: &[i64]) -> Vec<Vec<i64>> {
        (0..b).fold(vec![Vec::new()], |acc, _| {
            acc.iter()
                .flat_map(|w| {
                    choices.iter().map(move |&c| {
                        let mut w = w.clone();
                        w.push(c);
                        w
                    })
                })
                .collect()
        })
    }
    let diag = |d: &[i64]| -> IntMatrix {
        (0..d.len())
            .map(|i| {
                (0..d.len())
                    .map(|j| if i == j { -d[i] } else { 0 })
                    .collect()
            })
            .collect()
    };
    let mut out: Vec<IntMatrix> = multisets(b, 1, 4).iter().map(|d| diag(d)).collect();
    if b >= 2 {
        for w in words(b, &[2, 3, 4]) {
            let mut m = diag(&w);
            for i in 0..b - 1 {
                m[i][i + 1] = 1;
                m[i + 1][i] = 1;
            }
            out.push(m);
        }
    }
    out
}

/// HJ words of length `l` with `a_1` in `1..=4` and later entries in `2..=4`.
pub fn small_slopes(l: usize) -> Vec<SurgerySlope> {
    let mut words: Vec<Vec<i64>> = (1..=4).map(|a| vec![a]).collect();
    for _ in 1..l {
        words = words
            .into_iter()
            .flat_map(|w| {
                (2..=4).map(move |a| {
                    let mut w = w.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    words
        .into_iter()
        .map(|w| {
            let v = crate::numeric::hj_evaluate(&w).expect("entries >= 2 past the first");
            let p = u64::try_from(v.numer().clone()).expect("positive numerator");
            let q = u64::try_from(v.denom().clone()).expect("positive denominator");
            hj_expand(p, q).expect("valid slope")
        })
        .collect()
}

pub const NAIVE_RANK_BOUND: usize = 6;

/// All block pairs used for the naive cross-check.
pub fn naive_domain() -> Vec<FormBlock> {
    let mut out = Vec::new();
    for l in 1..=NAIVE_RANK_BOUND {
        for s in small_slopes(l) {
            for b in 0..=NAIVE_RANK_BOUND - l {
                for qx in small_qx_family(b) {
                    out.push(FormBlock::new(qx, &s).expect("family is negative definite"));
                }
            }
        }
    }
    out
}

fn embedding_end_to_end() -> Result<String, String> {
    let opts = SearchOptions::default();
    let three_halves = hj_expand(3, 2).expect("valid slope");
    let good = FormBlock::new(vec![vec![-3]], &three_halves).map_err(|e| e.to_string())?;
    let v = obstruct(None, &good, &opts).map_err(|e| e.to_string())?;
    let sigma = v.sigma.as_ref().map(|s| s.values().to_vec());
    if v.verdict != Verdict::Consistent || sigma != Some(vec![1]) {
        return Err(format!(
            "Q_X = (-3), 3/2: {:?} with sigma {sigma:?}",
            v.verdict
        ));
    }
    let bad = FormBlock::new(vec![vec![-2]], &three_halves).map_err(|e| e.to_string())?;
    let v = obstruct(None, &bad, &opts).map_err(|e| e.to_string())?;
    if v.verdict != Verdict::Obstructed {
        return Err(format!("Q_X = (-2), 3/2: {:?}", v.verdict));
    }
    let domain = naive_domain();
    let embeddable: Vec<Result<bool, String>> = domain
        .par_iter()
        .map(|blocks| {
            let fast = search_embedding(blocks, &opts)
                .map_err(|e| e.to_string())?
                .embeddable();
            let slow = naive_embedding(blocks).is_some();
            if fast != slow {
                return Err(format!(
                    "Q_X = {:?}, {}: search says {fast}, naive says {slow}",
                    blocks.qx(),
                    blocks.slope()
                ));
            }
            Ok(fast)
        })
        .collect();
    let mut positives = 0;
    for r in embeddable {
        positives += usize::from(r?);
    }
    Ok(format!(
        "3/2 certificates as expected; search = naive on {} blocks of rank <= {NAIVE_RANK_BOUND} ({positives} embeddable)",
        domain.len()
    ))
}

fn unknot_sanity() -> Result<String, String> {
    let data = validate_vh(&KnotDData::unknot()).expect("unknot data is valid");
    let slopes = slope_domain(1..=60);
    first_failure(&slopes, |s| {
        let table = deficiency_rational(&data, s);
        if table
            .values
            .iter()
            .chain(&table.integral_values)
            .any(|&x| x != 0)
        {
            return Some(format!("{s}: nonzero deficiency"));
        }
        let expected = if s.n() % 2 == 1 {
            Hypothesis::SatisfiedOdd
        } else {
            Hypothesis::SatisfiedEven
        };
        let got = vanishing_hypothesis(&data, s).status;
        (got != expected).then(|| format!("{s}: hypothesis {got:?}, expected {expected:?}"))
    })?;
    Ok(format!(
        "all deficiencies vanish on {} slopes (p <= 60, q <= 3p)",
        slopes.len()
    ))
}
