use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_evalharness")).args(args).output().unwrap()
}

#[test]
fn table_rows_have_the_report_format() {
    let data = fixture("triplets.tsv");
    let out = run(&["--data", data.to_str().unwrap(), "--selection", "predicted", "--topk", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Predicted QE (top-3)"), "{text}");
    let re = regex_lite::Regex::new(r"\d+\.\d{2} \([+-]\d+\.\d{2}\)").unwrap();
    assert_eq!(re.find_iter(&text).count(), 2, "{text}");
}

#[test]
fn json_output_and_oracle_run() {
    let data = fixture("oracle_triplets.tsv");
    let out = run(&["--data", data.to_str().unwrap(), "--scorer", "oracle", "--topk", "1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["corrected"]["ter"], 0.0);
    assert!(v["deltas"]["ter"].as_f64().unwrap() < 0.0);
}

#[test]
fn bad_input_fails() {
    assert_eq!(run(&["--data", "/nonexistent.tsv"]).status.code(), Some(2));
    let data = fixture("triplets.tsv");
    assert!(!run(&["--data", data.to_str().unwrap(), "--topk", "4"]).status.success());
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "only one column\n").unwrap();
    assert_eq!(run(&["--data", bad.to_str().unwrap()]).status.code(), Some(1));
}
