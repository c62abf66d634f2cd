//! End-to-end checks of the `twostage` binary: output contracts, exit codes
//! and reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn twostage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twostage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn instances_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn eight_cycle_file() -> String {
    instances_dir().join("eight_cycle.json").to_string_lossy().into_owned()
}

#[test]
fn solve_eight_cycle_file_prints_four() {
    let o = twostage(&["solve", "--instance", &eight_cycle_file()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# twostage-csv v1\n"));
    assert!(text.contains("online,exact,4,4"), "{text}");
}

#[test]
fn solve_edge_gap_matches_two_plus_root_two_times_n() {
    let o = twostage(&["solve", "--generate", "edge-gap:n=2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let objective = v[0]["objective"].as_f64().unwrap();
    assert!((objective - (2.0 + 2f64.sqrt()) * 2.0).abs() < 1e-9);
    assert_eq!(v[0]["backend"], "float");
}

#[test]
fn missing_file_is_an_input_error_naming_the_path() {
    let o = twostage(&["solve", "--instance", "/no/such/instance.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/instance.json"));
}

#[test]
fn edge_gap_rejects_n_zero() {
    assert_eq!(twostage(&["gap", "edge-gap", "--n-min", "0"]).status.code(), Some(2));
    assert_eq!(
        twostage(&["solve", "--generate", "edge-gap:n=0"]).status.code(),
        Some(2)
    );
}

#[test]
fn eight_cycle_gap_row_is_exact() {
    let o = twostage(&["gap", "eight-cycle"]);
    assert!(stdout(&o).lines().any(|l| l == "1,4,7/2,7/8,0.875,,,,"));
}

#[test]
fn edge_gap_table_reports_limit_and_agreement() {
    let text = stdout(&twostage(&["gap", "edge-gap", "--n-min", "1", "--n-max", "3"]));
    assert!(text.contains("# oracle_matches_closed_form true"));
    assert!(text.contains("# non_increasing true"));
    assert!(text.contains("# limit 2*sqrt(2)-2 = 0.828427"));
}

#[test]
fn round_augment_is_reproducible_and_thread_count_invariant() {
    let args = [
        "run",
        "round-augment",
        "--instance",
        &eight_cycle_file(),
        "--trials",
        "3000",
        "--seed",
        "7",
    ];
    let a = twostage(&args);
    let b = twostage(&args);
    let mut parallel: Vec<&str> = args.to_vec();
    parallel.extend(["--parallel", "4"]);
    let c = twostage(&parallel);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let row = stdout(&a).lines().nth(2).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    let ratio_lp: f64 = fields[8].parse().unwrap();
    assert!(ratio_lp >= 0.875 - 1e-9, "{row}");
    assert_eq!(fields[2], "7", "seed is echoed");
}

#[test]
fn require_oracle_exits_three_beyond_the_cap() {
    let spec = "random:seed=1,offline=6,online=4,scenarios=2,density=1";
    let o = twostage(&[
        "run",
        "round-augment",
        "--generate",
        spec,
        "--trials",
        "100",
        "--seed",
        "1",
        "--require-oracle",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = twostage(&["oracle", "--generate", spec]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn offline_round_meets_three_quarters() {
    let file = instances_dir().join("single_node.json");
    let o = twostage(&[
        "run",
        "offline-round",
        "--instance",
        file.to_str().unwrap(),
        "--trials",
        "20000",
        "--seed",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let (bound, matched): (f64, f64) = (row[3].parse().unwrap(), row[4].parse().unwrap());
    assert!(matched >= bound - 4.0 / 20000f64.sqrt(), "{text}");
}

#[test]
fn sample_reports_theoretical_k() {
    let o = twostage(&[
        "run",
        "sample",
        "--generate",
        "eight-cycle",
        "--trials",
        "200",
        "--seed",
        "2",
        "--k",
        "50",
        "--repetitions",
        "3",
        "--epsilon",
        "0.1",
        "--delta",
        "0.05",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    // Eight-cycle has 4 offline nodes.
    let expected = (200.0 * (8.0 * 2f64.ln() + 40f64.ln())).ceil() as u64;
    assert!(text.contains(&format!("# required_k {expected}")), "{text}");
}

#[test]
fn verify_crs_passes_and_writes_reports() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let out = dir.join("verify_crs.json");
    let o = twostage(&["verify", "crs", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert!(reports.iter().filter(|r| r["bound"] == "1 >= h(m)").count() == 200);
    assert!(reports.iter().all(|r| r["verdict"] == "pass"));
}

#[test]
fn verify_bounds_and_na_pass() {
    let o = twostage(&["verify", "bounds", "--seed", "3", "--count", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.ends_with(",pass,exact")).count(), 100);
    let o = twostage(&[
        "verify",
        "na",
        "--instance",
        &eight_cycle_file(),
        "--trials",
        "20000",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains(",statistical"));
}

#[test]
fn crs_check_hits_targets() {
    let o = twostage(&[
        "crs-check",
        "--y",
        "0.3,0.2,0.1",
        "--p",
        "0.6,0.5,0.4",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let c = v["c"].as_f64().unwrap();
    for (m, y) in v["marginals"].as_array().unwrap().iter().zip([0.3, 0.2, 0.1]) {
        assert!((m.as_f64().unwrap() - c * y).abs() < 1e-9);
    }
    assert_eq!(v["monotone"], true);
    // Activation below the precondition is an input error.
    assert_eq!(
        twostage(&["crs-check", "--y", "0.9", "--p", "0.1"]).status.code(),
        Some(2)
    );
}

#[test]
fn oracle_reports_seven_halves() {
    let text = stdout(&twostage(&["oracle", "--instance", &eight_cycle_file()]));
    assert!(text.lines().nth(2).unwrap().starts_with("7/2,3.5,"));
}

#[test]
fn mode_override_strips_weights() {
    let spec = "random:seed=4,offline=3,online=2,scenarios=2,mode=vertex";
    let weighted = stdout(&twostage(&["solve", "--generate", spec]));
    let plain = stdout(&twostage(&["solve", "--generate", spec, "--mode", "unweighted"]));
    assert_ne!(weighted, plain);
    assert_eq!(
        twostage(&["solve", "--generate", spec, "--mode", "edge"]).status.code(),
        Some(2)
    );
}
