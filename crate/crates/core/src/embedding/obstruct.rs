use std::time::{Duration, Instant};

use serde::Serialize;

use super::{search_embedding, EmbeddingMatrix, FormBlock, SearchOptions};
use crate::changemaker::ChangemakerVector;
use crate::deficiency::{validate_vh, vanishing_hypothesis, KnotDData, VanishingReport};
use crate::error::Result;
use crate::numeric::SurgerySlope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// The vanishing hypothesis holds (or is assumed) and no changemaker
    /// embedding exists, so `X` cannot bound the surgery.
    Obstructed,
    /// A changemaker embedding exists; the certificate is attached.
    Consistent,
    /// The hypothesis fails for the supplied knot data.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisStatus {
    /// No knot data was supplied and the hypothesis is taken as given.
    Assumed,
    Evaluated(VanishingReport),
}

impl HypothesisStatus {
    pub fn holds(&self) -> bool {
        match self {
            HypothesisStatus::Assumed => true,
            HypothesisStatus::Evaluated(r) => r.status.is_satisfied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionVerdict {
    pub slope: SurgerySlope,
    pub verdict: Verdict,
    pub hypothesis: HypothesisStatus,
    pub embeddable: bool,
    pub certificate: Option<EmbeddingMatrix>,
    pub sigma: Option<ChangemakerVector>,
    pub nodes: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Runs the changemaker search for `blocks` and combines it with the
/// vanishing hypothesis for `data` (assumed when `data` is `None`).
pub fn obstruct(
    data: Option<&KnotDData>,
    blocks: &FormBlock,
    opts: &SearchOptions,
) -> Result<ObstructionVerdict> {
    let start = Instant::now();
    let hypothesis = match data {
        None => HypothesisStatus::Assumed,
        Some(d) => {
            HypothesisStatus::Evaluated(vanishing_hypothesis(&validate_vh(d)?, blocks.slope()))
        }
    };
    let outcome = search_embedding(blocks, opts)?;
    let verdict = if !hypothesis.holds() {
        Verdict::NotApplicable
    } else if outcome.embeddable() {
        Verdict::Consistent
    } else {
        Verdict::Obstructed
    };
    Ok(ObstructionVerdict {
        slope: blocks.slope().clone(),
        verdict,
        hypothesis,
        embeddable: outcome.embeddable(),
        certificate: outcome.certificate,
        sigma: outcome.sigma,
        nodes: outcome.nodes,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::hj_expand;

    fn blocks(qx: Vec<Vec<i64>>, p: u64, q: u64) -> FormBlock {
        FormBlock::new(qx, &hj_expand(p, q).unwrap()).unwrap()
    }

    #[test]
    fn verdicts() {
        let opts = SearchOptions::default();
        let v = obstruct(None, &blocks(vec![vec![-2]], 3, 2), &opts).unwrap();
        assert_eq!(v.verdict, Verdict::Obstructed);
        assert!(v.certificate.is_none());
        let v = obstruct(None, &blocks(vec![vec![-3]], 3, 2), &opts).unwrap();
        assert_eq!(v.verdict, Verdict::Consistent);
        assert!(v.certificate.is_some());
        let data = KnotDData::from_v(vec![2, 1]);
        let v = obstruct(Some(&data), &blocks(vec![vec![-2]], 3, 2), &opts).unwrap();
        assert_eq!(v.verdict, Verdict::NotApplicable);
        let v = obstruct(
            Some(&KnotDData::unknot()),
            &blocks(vec![vec![-2]], 3, 2),
            &opts,
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Obstructed);
    }
}
