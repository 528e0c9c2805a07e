use std::io::Write;
use std::process::{Command, Output};

fn dehn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dehn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn hj_prints_the_word() {
    let out = dehn(&["hj", "7/3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "[3,2,2]");
    let out = dehn(&["hj", "--slope", "7/3", "--json"]);
    assert_eq!(stdout(&out).trim(), r#"{"slope":"7/3","word":[3,2,2]}"#);
}

#[test]
fn dinv_table_for_two() {
    let out = dehn(&["dinv", "2/1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1/4") && text.contains("-1/4"), "{text}");
    let out = dehn(&["dinv", "2/1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["slope"], "2/1");
    assert_eq!(v["covectors"], serde_json::json!([[0], [2]]));
    assert_eq!(v["d"], serde_json::json!([["0", "1/4"], ["2", "-1/4"]]));
}

#[test]
fn deficiency_from_flags_and_input_agree() {
    let a = dehn(&["deficiency", "--slope", "7/3", "--V", "1,0", "--json"]);
    let b = dehn(&[
        "deficiency",
        "--input",
        r#"{"slope":"7/3","V":[1,0],"H":null}"#,
        "--json",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["values"], serde_json::json!([2, 2, 2, 0, 0, 0, 0]));
    assert_eq!(v["integral_values"], serde_json::json!([2, 0, 0]));
}

#[test]
fn symmetry_passes_with_assert() {
    let out = dehn(&["symmetry", "7/3", "--V", "1,0", "--assert", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn changemaker_assert_sets_exit_code() {
    assert_eq!(
        dehn(&["changemaker", "1,1,2,4", "--assert"]).status.code(),
        Some(0)
    );
    assert_eq!(
        dehn(&["changemaker", "1,3", "--assert"]).status.code(),
        Some(1)
    );
    assert_eq!(dehn(&["changemaker", "1,-3"]).status.code(), Some(2));
    let out = dehn(&["changemaker", "--norm", "5", "--json"]);
    assert_eq!(stdout(&out).trim(), "[[1,1,1,1,1],[1,2]]");
}

#[test]
fn obstruct_verdicts_and_exit_codes() {
    let out = dehn(&[
        "obstruct", "--slope", "3/2", "--qx", "[[-3]]", "--V", "0", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "CONSISTENT");
    assert_eq!(v["sigma"], serde_json::json!([1]));
    assert_eq!(v["hypothesis"]["status"], "SATISFIED_EVEN");
    assert!(v.get("elapsed_ms").is_none());

    let out = dehn(&[
        "obstruct",
        "3/2",
        "--qx",
        r#"{"matrix": [[-2]]}"#,
        "--assert",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("OBSTRUCTED"));

    let out = dehn(&["obstruct", "3/2", "--qx", "[[-3]]", "--max-rank", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn obstruct_reads_qx_from_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"matrix": [[-3]]}}"#).unwrap();
    let arg = format!("@{}", file.path().display());
    let out = dehn(&["obstruct", "3/2", "--qx", &arg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("CONSISTENT"));
}

#[test]
fn json_output_is_stable_across_runs_and_workers() {
    let args = [
        "obstruct",
        "11/4",
        "--qx",
        "[[-2,1,0],[1,-2,1],[0,1,-4]]",
        "--json",
    ];
    let first = stdout(&dehn(&args));
    let again = stdout(&dehn(&args));
    let mut parallel_args = args.to_vec();
    parallel_args.extend(["--workers", "4"]);
    let parallel = stdout(&dehn(&parallel_args));
    assert_eq!(first, again);
    assert_eq!(first, parallel);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(dehn(&["hj", "6/4"]).status.code(), Some(2));
    assert_eq!(dehn(&["hj", "-7/3"]).status.code(), Some(2));
    assert_eq!(
        dehn(&["deficiency", "3/1", "--V", "1,2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dehn(&["obstruct", "3/2", "--qx", "[[1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dehn(&["obstruct", "3/2", "--qx", "[[3]]"]).status.code(),
        Some(2)
    );
    assert_eq!(dehn(&["bogus"]).status.code(), Some(2));
}
