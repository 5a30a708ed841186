use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn gradefj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradefj"))
        .current_dir(root())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_accepts_and_rejects() {
    let o = gradefj(&["check", "corpus/affinity_getter_omega.gfj"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: Pair[A:1]"), "{}", stdout(&o));
    let o = gradefj(&["check", "corpus/affinity_getter_bad_usage.gfj"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[t-sub]"), "{}", stdout(&o));
}

#[test]
fn check_json_is_stable() {
    let a = gradefj(&["check", "--json", "corpus/affinity_getter_bad_init.gfj"]);
    let b = gradefj(&["check", "--json", "corpus/affinity_getter_bad_init.gfj"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["accepted"], false);
    assert_eq!(v["diagnostics"][0]["code"], "GradeTooDemanding");
    assert_eq!(v["diagnostics"][0]["rule"], "t-sub");
}

#[test]
fn malformed_universe_and_program() {
    let o = gradefj(&["check", "corpus/naturals_two_blocks.gfj", "--universe", "universes/duplicate_path.json"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gfj");
    std::fs::write(&bad, "class A { run").unwrap();
    let o = gradefj(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = gradefj(&["check", dir.path().join("missing.gfj").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_prints_value_and_environment() {
    let o = gradefj(&["run", "corpus/naturals_two_blocks.gfj"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("value: new Pair(new A(), new A())"), "{s}");
    assert!(s.contains("env: a:N:0 p:N:0"), "{s}");
}

#[test]
fn run_trace_lines() {
    let o = gradefj(&["run", "--trace", "corpus/naturals_two_blocks.gfj"]);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[0].starts_with("#1 [block] grade=N:1 env={a:N:4}"), "{}", lines[0]);
    assert!(lines[5].starts_with("#6 [field-access]"), "{}", lines[5]);
}

#[test]
fn run_reports_stuck_states() {
    let o = gradefj(&["run", "corpus/naturals_field_extraction.gfj"]);
    assert_eq!(o.status.code(), Some(1));
    let o = gradefj(&["run", "--unchecked", "--json", "corpus/naturals_field_extraction.gfj"]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["stuck"]["code"], "FieldExtraction");
    assert!(v["stuck"]["message"].as_str().unwrap().contains("first"));
    let o = gradefj(&["run", "--unchecked", "--policy", "search", "corpus/naturals_resource_exhausted.gfj"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("resource `p` exhausted"), "{}", stdout(&o));
}

#[test]
fn run_divergence_and_standard() {
    let o = gradefj(&["run", "--fuel", "50", "corpus/loop_divergent.gfj"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fuel exhausted after 50 steps"));
    let o = gradefj(&["run", "--standard", "corpus/naturals_two_blocks.gfj"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("final after 8 steps"));
    assert!(stdout(&o).contains("env: a p"));
    let o = gradefj(&["run", "--fuel", "0", "corpus/loop_divergent.gfj"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_with_a_universe_file() {
    let o = gradefj(&[
        "run",
        "corpus/hetero_field_access.gfj",
        "--universe",
        "universes/fig5.json",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["outcome"], "final");
    assert_eq!(v["grade"], "P:private");
}

#[test]
fn laws_command() {
    let o = gradefj(&["laws", "universes/fig5.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("all laws hold\n"));
    let o = gradefj(&["laws", "universes/broken_distributivity.json"]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.contains("left-distributivity")).unwrap();
    assert!(line.contains("FAIL at (w, 1, 1)"), "{line}");
    let o = gradefj(&["laws"]);
    assert_eq!(o.status.code(), Some(0));
    let o = gradefj(&["laws", "universes/duplicate_path.json", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("two refinement paths"));
}
