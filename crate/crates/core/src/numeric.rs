//! Exact rationals, Hirzebruch–Jung continued fractions and surgery slopes.
//!
//! A slope `p/q` with `p, q > 0` coprime stands for `-p/q` surgery. It is
//! written `p = n*q - r` with `0 < r < q` when `q > 1`, and `n = p, r = 0`
//! when `q = 1`. Its negative continued fraction
//! `p/q = a_1 - 1/(a_2 - 1/(... - 1/a_l))` has `a_1 = n` and `a_i >= 2` for
//! `i >= 2`; only `a_1` may be 1, which happens exactly when `p < q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `"num/den"`, including integers (`"2/1"`).
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// A positive surgery slope together with its HJ expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurgerySlope {
    p: u64,
    q: u64,
    n: u64,
    r: u64,
    a: Vec<i64>,
}

impl SurgerySlope {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        hj_expand(p, q)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// The HJ word `[a_1, ..., a_l]`.
    pub fn word(&self) -> &[i64] {
        &self.a
    }

    /// Number of vertices `l` of the linear plumbing.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn params(&self) -> SlopeParams {
        slope_params(self)
    }

    /// The slope `q/r` described by the tail `[a_2, ..., a_l]`, if any.
    pub fn tail(&self) -> Option<SurgerySlope> {
        if self.q == 1 {
            None
        } else {
            Some(hj_expand(self.q, self.r).expect("tail of a valid slope is valid"))
        }
    }
}

impl fmt::Display for SurgerySlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for SurgerySlope {
    type Err = Error;

    /// Parses the ASCII form `p/q` (no spaces, no sign). A bare `p` means `p/1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidSlope(format!(
                "expected \"p/q\" with positive integers, got {s:?}"
            ))
        };
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) if digits(p) && digits(q) => (p, q),
            None if digits(s) => (s, "1"),
            _ => return Err(bad()),
        };
        let p = p.parse::<u64>().map_err(|_| bad())?;
        let q = q.parse::<u64>().map_err(|_| bad())?;
        hj_expand(p, q)
    }
}

impl Serialize for SurgerySlope {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SurgerySlope {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Computes the HJ expansion of `p/q`.
pub fn hj_expand(p: u64, q: u64) -> Result<SurgerySlope> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidSlope(format!(
            "{p}/{q}: p and q must be positive"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidSlope(format!(
            "{p}/{q}: p and q must be coprime"
        )));
    }
    let n = p.div_ceil(q);
    let r = n * q - p;
    let mut a = Vec::new();
    let (mut num, mut den) = (p, q);
    while den != 0 {
        let c = num.div_ceil(den);
        a.push(c as i64);
        let next = c * den - num;
        num = den;
        den = next;
    }
    Ok(SurgerySlope { p, q, n, r, a })
}

/// Evaluates `a_1 - 1/(a_2 - 1/(... - 1/a_l))` exactly.
pub fn hj_evaluate(a: &[i64]) -> Result<Rational> {
    let mut acc: Option<Rational> = None;
    for (pos, &ai) in a.iter().enumerate().rev() {
        let value = match acc {
            None => Rational::from_integer(ai.into()),
            Some(tail) => {
                if tail.is_zero() {
                    return Err(Error::ZeroTail(pos + 1));
                }
                Rational::from_integer(ai.into()) - tail.recip()
            }
        };
        acc = Some(value);
    }
    acc.ok_or_else(|| Error::Parse("empty continued fraction".into()))
}

/// `n`, `r` and the shift `delta(j) = floor((j + r) / q)` of a slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlopeParams {
    pub n: u64,
    pub r: u64,
    pub q: u64,
}

impl SlopeParams {
    pub fn delta(&self, j: u64) -> u64 {
        (j + self.r) / self.q
    }

    pub fn deltas(&self) -> Vec<u64> {
        (0..self.q).map(|j| self.delta(j)).collect()
    }
}

pub fn slope_params(s: &SurgerySlope) -> SlopeParams {
    SlopeParams {
        n: s.n,
        r: s.r,
        q: s.q,
    }
}

/// All valid slopes `p/q` with `p` in `p_range` and `1 <= q <= q_max(p)`.
pub fn slopes_in(
    p_range: std::ops::RangeInclusive<u64>,
    q_max: impl Fn(u64) -> u64,
) -> Vec<SurgerySlope> {
    p_range
        .flat_map(|p| {
            (1..=q_max(p))
                .filter(move |q| p.gcd(q) == 1)
                .map(move |q| hj_expand(p, q).expect("coprime positive pair"))
        })
        .collect()
}

pub(crate) fn is_integral(x: &Rational) -> bool {
    x.denom().is_one()
}
