use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qudit-epp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn numbers(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name).iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn recurrence_run_x_only_climbs() {
    let out = stdout(&["recurrence-run", "--d", "4", "--preset", "x_only", "--F", "0.40", "--protocol", "p1p2"]);
    assert!(out.starts_with("iter,step,F,success_prob,cum_yield\n"));
    let f = numbers(&out, "F");
    assert!(f.windows(2).all(|w| w[1] > w[0]), "{f:?}");
    assert!(*f.last().unwrap() >= 1.0 - 1e-4);
}

#[test]
fn recurrence_run_pure_input_is_one_row() {
    let out = stdout(&["recurrence-run", "--d", "3", "--F", "1"]);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn recurrence_run_from_state_file_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    std::fs::write(&path, r#"{"d": 7, "preset": "xz_mixture", "F": 0.6, "x_weight": 0.25}"#).unwrap();
    let out = stdout(&[
        "recurrence-run",
        "--state",
        path.to_str().unwrap(),
        "--Q",
        "0.88",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"], 7);
    assert_eq!(v["rows"][0]["F"], 0.6);
    assert!(v["outcome"].is_string());
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = run(&["thresholds", "--d", "5", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "d,protocol,Q_th\n5,bbpssw,0.862204186139\n");
}

#[test]
fn bbpssw_thresholds_decrease() {
    let out = stdout(&["thresholds", "--d", "2..40"]);
    let q = numbers(&out, "Q_th");
    assert_eq!(q.len(), 39);
    assert!(q.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn threshold_regime_grid() {
    let out = stdout(&["thresholds", "--d", "3", "--Q", "0.9,0.95,1"]);
    assert_eq!(column(&out, "purifiable"), ["false", "true", "true"]);
}

#[test]
fn p1p2_thresholds_match_quoted_tolerances() {
    let out = stdout(&["thresholds", "--protocol", "p1p2", "--d", "2,6"]);
    let q = numbers(&out, "Q_th");
    assert!((0.93..=0.95).contains(&q[0]), "{q:?}");
    assert!((0.81..=0.85).contains(&q[1]), "{q:?}");
}

#[test]
fn hashing_fmin_and_threshold_table() {
    let out = stdout(&["hashing", "--d", "2", "--fmin"]);
    let f = numbers(&out, "F_min")[0];
    assert!((f - 0.8107).abs() < 1e-3);
    let out = stdout(&["hashing", "--threshold", "--d-range", "primes:2..97"]);
    let q = numbers(&out, "q_min");
    assert_eq!(q.len(), 25);
    assert!(q.windows(2).all(|w| w[1] < w[0]));
    assert!(*q.last().unwrap() > 0.8409);
}

#[test]
fn hashing_finite_sweep() {
    let out = stdout(&["hashing", "--d", "5", "--F", "0.99", "--n-sweep", "10:1000", "--delta", "npow:-0.25"]);
    assert_eq!(out.lines().count(), 992);
    let f = numbers(&out, "F_out_bound");
    assert!(f.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn hashing_lemma1_is_seeded() {
    let a = stdout(&["hashing", "--lemma1", "--d", "3", "--trials", "20000", "--seed", "5"]);
    let b = stdout(&["hashing", "--lemma1", "--d", "3", "--trials", "20000", "--seed", "5"]);
    assert_eq!(a, b);
}

#[test]
fn hashing_noisy_grid() {
    let out = stdout(&["hashing", "--noisy", "--d", "2", "--p", "1", "--q", "0.9,1"]);
    assert_eq!(numbers(&out, "yield")[1], 1.0);
}

#[test]
fn ghz_curves() {
    let out = stdout(&["ghz", "--d", "2", "--N", "2,3,4,5", "--F", "0.9"]);
    let y = numbers(&out, "yield");
    assert!(y.windows(2).all(|w| w[1] > w[0]), "{y:?}");
    let out = stdout(&["ghz", "--d", "2,3,5,11", "--N", "3", "--F", "0.9,1"]);
    let y = numbers(&out, "yield");
    let at_09: Vec<f64> = y.iter().step_by(2).copied().collect();
    assert!(at_09.windows(2).all(|w| w[1] > w[0]), "{at_09:?}");
    assert!(y.iter().skip(1).step_by(2).all(|&v| v == 1.0));
}

#[test]
fn ghz_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ghz.json");
    std::fs::write(&path, r#"{"d": 2, "N": 3, "preset": "ghz_isotropic", "F": 0.9}"#).unwrap();
    let out = stdout(&["ghz", "--state", path.to_str().unwrap()]);
    assert!((numbers(&out, "yield")[0] - 0.368).abs() < 1e-3);
}

#[test]
fn yields_prefer_diagonal_inputs() {
    let out = stdout(&["yields", "--d", "5", "--preset", "x_only,isotropic", "--F", "0.6"]);
    let y = numbers(&out, "yield");
    assert!(y[0] > y[1] && y[1] > 0.0, "{y:?}");
}

#[test]
fn oracle_check_passes_and_is_deterministic() {
    let a = stdout(&["oracle-check", "--d", "2", "--states", "5", "--seed", "3"]);
    let b = stdout(&["oracle-check", "--d", "2", "--states", "5", "--seed", "3"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["passed"], true);
    let csv = stdout(&["oracle-check", "--d", "2", "--states", "2", "--format", "csv"]);
    assert!(csv.starts_with("check,d,max_deviation,passed\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["oracle-check", "--d", "7"]).status.code(), Some(2));
    assert_eq!(run(&["hashing", "--d", "4", "--fmin"]).status.code(), Some(2));
    assert_eq!(run(&["hashing", "--d", "2..10", "--fmin"]).status.code(), Some(2));
    assert_eq!(run(&["recurrence-run", "--d", "3", "--F", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["recurrence-run", "--d", "3"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["recurrence-run", "--state", "/definitely/missing.json"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(run(&["recurrence-run", "--state", bad.to_str().unwrap()]).status.code(), Some(2));
    let out = dir.path().join("missing-dir").join("x.csv");
    assert_eq!(
        run(&["thresholds", "--d", "3", "--output", out.to_str().unwrap()]).status.code(),
        Some(1)
    );
}
