//! Text and JSON renderings of command results.

use dehn_core::deficiency::{DeficiencyTable, SymmetryWitness};
use dehn_core::embedding::{HypothesisStatus, ObstructionVerdict};
use dehn_core::linalg::IntMatrix;
use dehn_core::numeric::format_rational;
use dehn_core::plumbing::CharVector;
use dehn_core::{Rational, SurgerySlope};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Serialize)]
pub struct DTable {
    pub slope: SurgerySlope,
    pub covectors: Vec<Vec<i64>>,
    pub d: Vec<(String, String)>,
}

impl DTable {
    pub fn new(slope: &SurgerySlope, rows: &[(CharVector, Rational)]) -> Self {
        Self {
            slope: slope.clone(),
            covectors: rows.iter().map(|(k, _)| k.coords().to_vec()).collect(),
            d: rows
                .iter()
                .map(|(k, d)| (k.to_string(), format_rational(d)))
                .collect(),
        }
    }

    pub fn text(&self) -> String {
        let width = self
            .d
            .iter()
            .map(|(k, _)| k.len())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut out = format!("{:<width$}  d\n", "K");
        for (k, d) in &self.d {
            out.push_str(&format!("{k:<width$}  {d}\n"));
        }
        out
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

pub fn deficiency_text(t: &DeficiencyTable) -> String {
    format!(
        "slope {} (n = {}, r = {})\nD^p/q: {}\nD^n:   {}\nmin D^n = {}\n",
        t.slope,
        t.n,
        t.r,
        join(&t.values),
        join(&t.integral_values),
        t.min
    )
}

pub fn symmetry_text(slope: &SurgerySlope, w: &SymmetryWitness) -> String {
    let show = |m: &std::collections::BTreeMap<u64, u64>| {
        m.iter()
            .map(|(v, c)| format!("{v}x{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "slope {slope}: symmetry {}\nrational: {}\nexpected: {}\nintegral: {}\n",
        if w.holds { "holds" } else { "FAILS" },
        show(&w.rational),
        show(&w.expected),
        show(&w.integral)
    )
}

pub fn matrix_text(m: &IntMatrix) -> String {
    let width = m
        .iter()
        .flatten()
        .map(|x| x.to_string().len())
        .max()
        .unwrap_or(1);
    m.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:>width$}")).collect();
            format!("  [{}]\n", cells.join(" "))
        })
        .collect()
}

pub fn verdict_json(v: &ObstructionVerdict, timing: bool) -> Value {
    let mut value = serde_json::to_value(v).expect("verdict serializes");
    if timing {
        value["elapsed_ms"] = json!(v.elapsed.as_secs_f64() * 1000.0);
    }
    value
}

pub fn verdict_text(v: &ObstructionVerdict, timing: bool) -> String {
    let hypothesis = match &v.hypothesis {
        HypothesisStatus::Assumed => "assumed (no knot data given)".to_string(),
        HypothesisStatus::Evaluated(r) => format!(
            "{} ({} vanishing rational deficiencies)",
            serde_json::to_value(r.status)
                .expect("status serializes")
                .as_str()
                .unwrap_or("?"),
            r.count
        ),
    };
    let verdict = serde_json::to_value(v.verdict).expect("verdict serializes");
    let mut out = format!(
        "slope {}\nhypothesis: {hypothesis}\nverdict: {}\n",
        v.slope,
        verdict.as_str().unwrap_or("?")
    );
    match &v.certificate {
        Some(cert) => {
            out.push_str("certificate (rows: Q_X, then x, y_2, ...):\n");
            out.push_str(&matrix_text(cert.rows()));
        }
        None => out.push_str("no changemaker embedding exists\n"),
    }
    if let Some(sigma) = &v.sigma {
        out.push_str(&format!("sigma: {:?}\n", sigma.values()));
    }
    out.push_str(&format!("nodes: {}\n", v.nodes));
    if timing {
        out.push_str(&format!(
            "elapsed: {:.3} ms\n",
            v.elapsed.as_secs_f64() * 1000.0
        ));
    }
    out
}
