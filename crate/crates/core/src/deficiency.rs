//! Ni–Wu deficiencies of `-p/q` and `-n` surgeries computed from the knot
//! invariants `V_i` (`i >= 0`) and `H_i` (`i <= 0`).
//!
//! Supplied data must already belong to the mirrored knot; nothing here
//! mirrors anything. `V_i = 0` past the end of the list, and when `H` is not
//! supplied it defaults to `H_i = V_{-i}`.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::SurgerySlope;
use crate::plumbing;

/// Raw knot input. `h`, when present, lists `H_0, H_{-1}, H_{-2}, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct KnotDData {
    #[serde(rename = "V")]
    pub v: Vec<i64>,
    #[serde(rename = "H", default)]
    pub h: Option<Vec<i64>>,
}

impl KnotDData {
    pub fn from_v(v: Vec<i64>) -> Self {
        Self { v, h: None }
    }

    pub fn unknot() -> Self {
        Self::from_v(vec![0])
    }
}

/// V/H data that satisfies the Ni–Wu constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedKnotData {
    v: Vec<u64>,
    h: Vec<u64>,
}

impl CheckedKnotData {
    pub fn v(&self, i: i64) -> u64 {
        assert!(i >= 0, "V is indexed by i >= 0");
        self.v.get(i as usize).copied().unwrap_or(0)
    }

    pub fn h(&self, i: i64) -> u64 {
        assert!(i <= 0, "H is indexed by i <= 0");
        self.h.get((-i) as usize).copied().unwrap_or(0)
    }

    pub fn v_list(&self) -> &[u64] {
        &self.v
    }
}

fn check_sequence(name: &'static str, xs: &[i64]) -> Result<Vec<u64>> {
    for (i, &x) in xs.iter().enumerate() {
        if x < 0 {
            return Err(Error::InvalidKnotData {
                sequence: name,
                index: i,
                reason: format!("entry {x} is negative"),
            });
        }
        if i > 0 && x > xs[i - 1] {
            let reason = if name == "V" {
                format!(
                    "V_{i} = {x} exceeds V_{} = {}; V must be non-increasing",
                    i - 1,
                    xs[i - 1]
                )
            } else {
                format!(
                    "H_-{i} = {x} exceeds H_-{} = {}; H must be non-decreasing",
                    i - 1,
                    xs[i - 1]
                )
            };
            return Err(Error::InvalidKnotData {
                sequence: name,
                index: i,
                reason,
            });
        }
    }
    Ok(xs.iter().map(|&x| x as u64).collect())
}

/// Checks `V_0 = H_0`, non-negativity and monotonicity, filling in the
/// default `H` when absent.
pub fn validate_vh(data: &KnotDData) -> Result<CheckedKnotData> {
    let v = if data.v.is_empty() {
        vec![0]
    } else {
        data.v.clone()
    };
    let v = check_sequence("V", &v)?;
    let h = match &data.h {
        None => v.clone(),
        Some(h) => {
            let h = check_sequence("H", h)?;
            let h0 = h.first().copied().unwrap_or(0);
            if h0 != v[0] {
                return Err(Error::InvalidKnotData {
                    sequence: "H",
                    index: 0,
                    reason: format!("H_0 = {h0} differs from V_0 = {}", v[0]),
                });
            }
            h
        }
    };
    Ok(CheckedKnotData { v, h })
}

/// Deficiencies of `-p/q` surgery (indexed `0..p`) and of `-n` surgery
/// (indexed `0..n`). All entries are `2 max{V, H}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeficiencyTable {
    pub slope: SurgerySlope,
    pub n: u64,
    pub r: u64,
    pub values: Vec<u64>,
    pub integral_values: Vec<u64>,
    /// The minimal integral deficiency `2m`.
    pub min: u64,
}

pub fn rational_deficiency(data: &CheckedKnotData, s: &SurgerySlope, i: u64) -> u64 {
    let (p, q, i) = (s.p() as i64, s.q() as i64, i as i64);
    2 * data
        .v(Integer::div_floor(&i, &q))
        .max(data.h(Integer::div_floor(&(i - p), &q)))
}

pub fn integral_deficiency(data: &CheckedKnotData, n: u64, i: u64) -> u64 {
    let (n, i) = (n as i64, i as i64);
    2 * data.v(i).max(data.h(i - n))
}

pub fn deficiency_rational(data: &CheckedKnotData, s: &SurgerySlope) -> DeficiencyTable {
    let values: Vec<u64> = (0..s.p())
        .map(|i| rational_deficiency(data, s, i))
        .collect();
    let integral_values: Vec<u64> = (0..s.n())
        .map(|i| integral_deficiency(data, s.n(), i))
        .collect();
    let min = integral_values.iter().copied().min().unwrap_or(0);
    DeficiencyTable {
        slope: s.clone(),
        n: s.n(),
        r: s.r(),
        values,
        integral_values,
        min,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Minimisers {
    /// Half the minimal integral deficiency.
    pub m: u64,
    pub indices: Vec<u64>,
}

pub fn integral_minimisers(data: &CheckedKnotData, n: u64) -> Minimisers {
    let values: Vec<u64> = (0..n).map(|i| integral_deficiency(data, n, i)).collect();
    let min = values.iter().copied().min().unwrap_or(0);
    let indices = (0..n).filter(|&i| values[i as usize] == min).collect();
    Minimisers {
        m: min / 2,
        indices,
    }
}

/// The central labels that always attain the minimum: `n/2` for even `n`,
/// `(n +- 1)/2` for odd `n` (labels taken mod `n`).
pub fn central_labels(n: u64) -> Vec<u64> {
    if n.is_multiple_of(2) {
        vec![(n / 2) % n]
    } else {
        let mut v = vec![((n - 1) / 2) % n, n.div_ceil(2) % n];
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumIdentity {
    pub lhs: i128,
    pub rhs: i128,
    pub holds: bool,
}

/// `sum D^{p/q} = q sum D^n - r min D^n`.
pub fn sum_identity_check(data: &CheckedKnotData, s: &SurgerySlope) -> SumIdentity {
    let table = deficiency_rational(data, s);
    let lhs: i128 = table.values.iter().map(|&x| x as i128).sum();
    let integral: i128 = table.integral_values.iter().map(|&x| x as i128).sum();
    let rhs = s.q() as i128 * integral - s.r() as i128 * table.min as i128;
    SumIdentity {
        lhs,
        rhs,
        holds: lhs == rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryWitness {
    pub holds: bool,
    /// Multiset of rational deficiencies, value -> multiplicity.
    pub rational: BTreeMap<u64, u64>,
    /// Multiset of integral deficiencies.
    pub integral: BTreeMap<u64, u64>,
    /// `q` copies of `integral` with `r` copies of the minimum removed.
    pub expected: BTreeMap<u64, u64>,
}

fn multiset(xs: &[u64]) -> BTreeMap<u64, u64> {
    let mut m = BTreeMap::new();
    for &x in xs {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

pub fn symmetry_check(data: &CheckedKnotData, s: &SurgerySlope) -> SymmetryWitness {
    let table = deficiency_rational(data, s);
    let rational = multiset(&table.values);
    let integral = multiset(&table.integral_values);
    let mut expected: BTreeMap<u64, u64> = integral.iter().map(|(&k, &c)| (k, c * s.q())).collect();
    let mut holds = true;
    match expected.get_mut(&table.min) {
        Some(c) if *c >= s.r() => *c -= s.r(),
        _ => holds = false,
    }
    expected.retain(|_, c| *c > 0);
    holds &= expected == rational;
    SymmetryWitness {
        holds,
        rational,
        integral,
        expected,
    }
}

/// Checks the rational deficiencies through the covector bridge: every member of the
/// family `K'` is sent to the integral label of its first coordinate, the
/// fibre sizes are `q` except `q - r` at one label, that label minimises
/// `D^n`, and the pulled-back multiset equals the rational one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeCheck {
    pub fibres: Vec<usize>,
    pub exceptional_label: u64,
    pub exceptional_is_minimiser: bool,
    pub multiset_matches: bool,
}

impl BridgeCheck {
    pub fn holds(&self) -> bool {
        self.exceptional_is_minimiser && self.multiset_matches
    }
}

pub fn bridge_check(data: &CheckedKnotData, s: &SurgerySlope) -> BridgeCheck {
    let table = deficiency_rational(data, s);
    let fibres = plumbing::integral_fibres(s);
    let exceptional_label =
        plumbing::integral_label(plumbing::exceptional_first_coordinate(s.n()), s.n());
    let exceptional_is_minimiser = table.integral_values[exceptional_label as usize] == table.min;
    let mut pulled = BTreeMap::new();
    for (label, &count) in fibres.iter().enumerate() {
        if count > 0 {
            *pulled.entry(table.integral_values[label]).or_insert(0) += count as u64;
        }
    }
    let multiset_matches = pulled == multiset(&table.values);
    BridgeCheck {
        fibres,
        exceptional_label,
        exceptional_is_minimiser,
        multiset_matches,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Hypothesis {
    /// `n` odd and at least one rational deficiency vanishes.
    SatisfiedOdd,
    /// `n` even and at least `q - r + 1` rational deficiencies vanish.
    SatisfiedEven,
    /// `q = 2`, `n` even, and at least one rational deficiency vanishes.
    SatisfiedQ2,
    NotSatisfied,
}

impl Hypothesis {
    pub fn is_satisfied(self) -> bool {
        self != Hypothesis::NotSatisfied
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub status: Hypothesis,
    /// Number of vanishing rational deficiencies.
    pub count: u64,
}

pub fn vanishing_hypothesis(data: &CheckedKnotData, s: &SurgerySlope) -> VanishingReport {
    let table = deficiency_rational(data, s);
    let count = table.values.iter().filter(|&&x| x == 0).count() as u64;
    let status = if s.n() % 2 == 1 {
        if count >= 1 {
            Hypothesis::SatisfiedOdd
        } else {
            Hypothesis::NotSatisfied
        }
    } else if count > s.q() - s.r() {
        Hypothesis::SatisfiedEven
    } else if s.q() == 2 && count >= 1 {
        Hypothesis::SatisfiedQ2
    } else {
        Hypothesis::NotSatisfied
    };
    VanishingReport { status, count }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::hj_expand;

    fn checked(v: &[i64]) -> CheckedKnotData {
        validate_vh(&KnotDData::from_v(v.to_vec())).unwrap()
    }

    fn slope(p: u64, q: u64) -> SurgerySlope {
        hj_expand(p, q).unwrap()
    }

    #[test]
    fn validation() {
        let u = checked(&[0]);
        assert_eq!((u.v(5), u.h(-5)), (0, 0));
        let t = checked(&[1, 0]);
        assert_eq!((t.v(0), t.h(0), t.h(-1)), (1, 1, 0));
        let err = validate_vh(&KnotDData::from_v(vec![0, 1])).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidKnotData {
                sequence: "V",
                index: 1,
                ..
            }
        ));
        let err = validate_vh(&KnotDData::from_v(vec![2, -1])).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidKnotData {
                sequence: "V",
                index: 1,
                ..
            }
        ));
        let bad_h = KnotDData {
            v: vec![1, 0],
            h: Some(vec![2, 0]),
        };
        assert!(matches!(
            validate_vh(&bad_h).unwrap_err(),
            Error::InvalidKnotData {
                sequence: "H",
                index: 0,
                ..
            }
        ));
        let bad_h = KnotDData {
            v: vec![1, 0],
            h: Some(vec![1, 0, 1]),
        };
        assert!(matches!(
            validate_vh(&bad_h).unwrap_err(),
            Error::InvalidKnotData {
                sequence: "H",
                index: 2,
                ..
            }
        ));
        let custom = validate_vh(&KnotDData {
            v: vec![2, 1],
            h: Some(vec![2, 2]),
        })
        .unwrap();
        assert_eq!((custom.h(-1), custom.h(-2)), (2, 0));
    }

    #[test]
    fn trefoil_tables() {
        let t = checked(&[1, 0]);
        let table = deficiency_rational(&t, &slope(7, 3));
        assert_eq!(table.values, vec![2, 2, 2, 0, 0, 0, 0]);
        assert_eq!(table.integral_values, vec![2, 0, 0]);
        let table = deficiency_rational(&t, &slope(3, 1));
        assert_eq!(table.integral_values, vec![2, 0, 0]);
        assert_eq!(table.min, 0);
    }

    #[test]
    fn unknot_vanishes() {
        let u = checked(&[0]);
        for s in crate::numeric::slopes_in(1..=20, |p| 2 * p) {
            let table = deficiency_rational(&u, &s);
            assert!(table.values.iter().all(|&x| x == 0));
            assert!(table.integral_values.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn minimisers() {
        let t = checked(&[1, 0]);
        assert_eq!(
            integral_minimisers(&t, 3),
            Minimisers {
                m: 0,
                indices: vec![1, 2]
            }
        );
        let u = checked(&[0]);
        assert_eq!(integral_minimisers(&u, 4).indices, vec![0, 1, 2, 3]);
        let k = checked(&[3, 2, 1]);
        for n in 1..12 {
            let mins = integral_minimisers(&k, n);
            for c in central_labels(n) {
                assert!(mins.indices.contains(&c), "n={n}");
            }
            assert_eq!(integral_deficiency(&k, n, 0), 6);
        }
    }

    #[test]
    fn sum_identity_examples() {
        let t = checked(&[1, 0]);
        assert_eq!(
            sum_identity_check(&t, &slope(7, 3)),
            SumIdentity {
                lhs: 6,
                rhs: 6,
                holds: true
            }
        );
        assert!(sum_identity_check(&checked(&[2, 1, 0]), &slope(5, 2)).holds);
        let u = checked(&[0]);
        assert_eq!(sum_identity_check(&u, &slope(11, 4)).lhs, 0);
    }

    #[test]
    fn symmetry_witness_for_trefoil() {
        let w = symmetry_check(&checked(&[1, 0]), &slope(7, 3));
        assert!(w.holds);
        assert_eq!(w.rational, [(0, 4), (2, 3)].into_iter().collect());
        assert_eq!(w.integral, [(0, 2), (2, 1)].into_iter().collect());
        assert_eq!(w.expected, w.rational);
    }

    #[test]
    fn bridge_on_small_cases() {
        for v in [&[0][..], &[1, 0], &[2, 1, 1, 0], &[3, 3, 1]] {
            let d = checked(v);
            for s in crate::numeric::slopes_in(1..=15, |p| p + 3) {
                let b = bridge_check(&d, &s);
                assert!(b.holds(), "{v:?} {s}: {b:?}");
            }
        }
    }

    #[test]
    fn hypothesis_examples() {
        let u = checked(&[0]);
        assert_eq!(
            vanishing_hypothesis(&u, &slope(7, 3)),
            VanishingReport {
                status: Hypothesis::SatisfiedOdd,
                count: 7
            }
        );
        let v1 = checked(&[1]);
        let rep = vanishing_hypothesis(&v1, &slope(2, 1));
        assert_eq!(rep.count, 1);
        assert_eq!(rep.status, Hypothesis::NotSatisfied);
        let t = checked(&[1, 0]);
        let rep = vanishing_hypothesis(&t, &slope(3, 2));
        assert_eq!(
            rep,
            VanishingReport {
                status: Hypothesis::SatisfiedQ2,
                count: 1
            }
        );
        let big = checked(&[5, 0]);
        assert_eq!(
            vanishing_hypothesis(&big, &slope(3, 1)).status,
            Hypothesis::SatisfiedOdd
        );
        assert_eq!(
            vanishing_hypothesis(&checked(&[5, 5, 5]), &slope(3, 1)).status,
            Hypothesis::NotSatisfied
        );
    }
}
