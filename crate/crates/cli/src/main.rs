mod report;

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dehn_core::acceptance;
use dehn_core::changemaker::{enumerate_changemakers, is_changemaker};
use dehn_core::deficiency::{
    bridge_check, deficiency_rational, symmetry_check, validate_vh, KnotDData,
};
use dehn_core::embedding::{
    obstruct, parse_qx, FormBlock, SearchOptions, Verdict, DEFAULT_MAX_RANK,
};
use dehn_core::plumbing::{
    build_matrix, enumerate_initial, enumerate_k_prime, lens_d_invariants, square,
};
use dehn_core::{Rational, SurgerySlope};
use serde::Deserialize;
use serde_json::json;

/// Correction-term deficiencies and changemaker obstructions for
/// `-p/q` surgeries. Slopes are always written as the positive pair `p/q`.
#[derive(Parser)]
#[command(name = "dehn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hirzebruch–Jung expansion of a slope.
    Hj {
        #[command(flatten)]
        slope: SlopeArg,
        #[arg(long)]
        json: bool,
    },
    /// Correction terms of the lens space from a covector family.
    Dinv {
        #[command(flatten)]
        slope: SlopeArg,
        #[arg(long, value_enum, default_value_t = Family::K)]
        family: Family,
        #[arg(long)]
        json: bool,
    },
    /// Rational and integral deficiencies from V/H data.
    Deficiency {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long)]
        json: bool,
    },
    /// Checks the multiset relation between rational and integral deficiencies.
    Symmetry {
        #[command(flatten)]
        knot: KnotArgs,
        #[arg(long)]
        json: bool,
        /// Exit with status 1 when the check fails.
        #[arg(long)]
        assert: bool,
    },
    /// Tests a changemaker set, or enumerates them with `--norm`.
    Changemaker {
        /// Comma-separated entries.
        #[arg(value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<i64>>,
        #[arg(long, conflicts_with = "values")]
        norm: Option<u64>,
        #[arg(long, default_value_t = 16)]
        max_len: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        assert: bool,
    },
    /// Searches for a changemaker embedding of Q_X ⊕ Q_W.
    Obstruct {
        #[command(flatten)]
        knot: KnotArgs,
        /// Q_X as inline JSON (`[[-3]]` or `{"matrix": [[-3]]}`) or `@file`.
        #[arg(long)]
        qx: String,
        #[arg(long, default_value_t = DEFAULT_MAX_RANK)]
        max_rank: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        json: bool,
        /// Exit with status 1 on OBSTRUCTED.
        #[arg(long)]
        assert: bool,
        /// Report wall time (makes output run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Runs the acceptance suite.
    Selftest {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Initial,
    K,
    KPrime,
}

#[derive(Args)]
struct SlopeArg {
    /// Slope `p/q` (positional form).
    #[arg(value_name = "P/Q")]
    positional: Option<String>,
    #[arg(long = "slope", value_name = "P/Q", conflicts_with = "positional")]
    flag: Option<String>,
}

impl SlopeArg {
    fn resolve(&self) -> Result<SurgerySlope, String> {
        let raw = self
            .flag
            .as_deref()
            .or(self.positional.as_deref())
            .ok_or("a slope p/q is required")?;
        raw.parse().map_err(|e: dehn_core::Error| e.to_string())
    }
}

#[derive(Args)]
struct KnotArgs {
    #[command(flatten)]
    slope: SlopeArg,
    /// V_0, V_1, ... as a comma list.
    #[arg(long = "V", value_delimiter = ',', allow_negative_numbers = true)]
    v: Option<Vec<i64>>,
    /// H_0, H_-1, ... as a comma list; defaults to H_i = V_-i.
    #[arg(long = "H", value_delimiter = ',', allow_negative_numbers = true)]
    h: Option<Vec<i64>>,
    /// `{"slope": "7/3", "V": [1, 0], "H": null}` inline or as `@file`.
    #[arg(long, conflicts_with_all = ["v", "h"])]
    input: Option<String>,
}

#[derive(Deserialize)]
struct KnotInput {
    slope: Option<SurgerySlope>,
    #[serde(flatten)]
    data: KnotDData,
}

impl KnotArgs {
    fn resolve(&self) -> Result<(SurgerySlope, Option<KnotDData>), String> {
        if let Some(raw) = &self.input {
            let text = read_inline_or_file(raw)?;
            let parsed: KnotInput =
                serde_json::from_str(&text).map_err(|e| format!("bad input JSON: {e}"))?;
            let slope = match parsed.slope {
                Some(s) if self.slope.positional.is_none() && self.slope.flag.is_none() => s,
                _ => self.slope.resolve()?,
            };
            return Ok((slope, Some(parsed.data)));
        }
        let slope = self.slope.resolve()?;
        let data = match (&self.v, &self.h) {
            (None, None) => None,
            (v, h) => Some(KnotDData {
                v: v.clone().unwrap_or_default(),
                h: h.clone(),
            }),
        };
        Ok((slope, data))
    }

    fn require_data(&self) -> Result<(SurgerySlope, KnotDData), String> {
        match self.resolve()? {
            (s, Some(d)) => Ok((s, d)),
            (_, None) => Err("knot data is required (--V, --H or --input)".into()),
        }
    }
}

fn read_inline_or_file(raw: &str) -> Result<String, String> {
    match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(raw.to_string()),
    }
}

fn print_json(value: &impl serde::Serialize) {
    println!(
        "{}",
        serde_json::to_string(value).expect("output serializes")
    );
}

/// Exit status on success: 0, or 1 when an asserted check fails.
fn run(cli: Cli) -> Result<u8, String> {
    let err = |e: dehn_core::Error| e.to_string();
    match cli.command {
        Command::Hj { slope, json } => {
            let s = slope.resolve()?;
            if json {
                print_json(&json!({ "slope": s, "word": s.word() }));
            } else {
                println!(
                    "{}",
                    serde_json::to_string(s.word()).expect("word serializes")
                );
            }
            Ok(0)
        }
        Command::Dinv {
            slope,
            family,
            json,
        } => {
            let s = slope.resolve()?;
            let rows: Vec<(_, Rational)> = match family {
                Family::K => lens_d_invariants(&s),
                Family::Initial | Family::KPrime => {
                    let members = match family {
                        Family::Initial => enumerate_initial(&s).members,
                        _ => enumerate_k_prime(&s).members,
                    };
                    let q = build_matrix(&s);
                    let len = Rational::from_integer((s.len() as i64).into());
                    let four = Rational::from_integer(4.into());
                    members
                        .into_iter()
                        .map(|k| {
                            let d = (square(&k, &q).map_err(err)? + &len) / &four;
                            Ok((k, d))
                        })
                        .collect::<Result<_, String>>()?
                }
            };
            let table = report::DTable::new(&s, &rows);
            if json {
                print_json(&table);
            } else {
                print!("{}", table.text());
            }
            Ok(0)
        }
        Command::Deficiency { knot, json } => {
            let (s, data) = knot.require_data()?;
            let table = deficiency_rational(&validate_vh(&data).map_err(err)?, &s);
            if json {
                print_json(&table);
            } else {
                print!("{}", report::deficiency_text(&table));
            }
            Ok(0)
        }
        Command::Symmetry { knot, json, assert } => {
            let (s, data) = knot.require_data()?;
            let checked = validate_vh(&data).map_err(err)?;
            let witness = symmetry_check(&checked, &s);
            let bridge = bridge_check(&checked, &s);
            let holds = witness.holds && bridge.holds();
            if json {
                print_json(
                    &json!({ "slope": s, "holds": holds, "witness": witness, "bridge": bridge }),
                );
            } else {
                print!("{}", report::symmetry_text(&s, &witness));
                println!(
                    "covector bridge: exceptional label {} {} a minimiser; fibres {:?}",
                    bridge.exceptional_label,
                    if bridge.exceptional_is_minimiser {
                        "is"
                    } else {
                        "is NOT"
                    },
                    bridge.fibres
                );
            }
            Ok(u8::from(assert && !holds))
        }
        Command::Changemaker {
            values,
            norm,
            max_len,
            json,
            assert,
        } => {
            if let Some(norm) = norm {
                let all = enumerate_changemakers(norm, max_len);
                if json {
                    print_json(&all);
                } else {
                    for c in &all {
                        println!("{:?}", c.values());
                    }
                }
                return Ok(0);
            }
            let values = values.unwrap_or_default();
            let ok = is_changemaker(&values).map_err(err)?;
            if json {
                print_json(&json!({ "values": values, "changemaker": ok }));
            } else {
                println!("{ok}");
            }
            Ok(u8::from(assert && !ok))
        }
        Command::Obstruct {
            knot,
            qx,
            max_rank,
            workers,
            json,
            assert,
            timing,
        } => {
            let (s, data) = knot.resolve()?;
            let qx = parse_qx(&read_inline_or_file(&qx)?).map_err(err)?;
            let blocks = FormBlock::new(qx, &s).map_err(err)?;
            let opts = SearchOptions {
                max_rank,
                workers: workers.max(1),
            };
            let verdict = obstruct(data.as_ref(), &blocks, &opts).map_err(err)?;
            if json {
                println!("{}", report::verdict_json(&verdict, timing));
            } else {
                print!("{}", report::verdict_text(&verdict, timing));
            }
            Ok(u8::from(assert && verdict.verdict == Verdict::Obstructed))
        }
        Command::Selftest { json } => {
            let mut failed = false;
            let mut reports = Vec::new();
            for criterion in acceptance::criteria() {
                let r = criterion.run();
                failed |= !r.pass;
                if !json {
                    println!("{r}");
                }
                reports.push(r);
            }
            if json {
                print_json(&reports);
            }
            Ok(u8::from(failed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
