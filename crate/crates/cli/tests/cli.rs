//! Binary-level checks: flag parsing, config-file precedence, output files,
//! backends, and the exit-code contract (0 pass, 1 failed check, 2 usage).

use std::process::{Command, Output};

fn rde5(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rde5")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn simulate_writes_csv_to_stdout_and_file() {
    let args = ["simulate", "--ic", "1/5,9,5,7,2", "--a", "-1", "--b", "1", "--n-max", "7"];
    let out = rde5(&args);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,x_n\n-4,1/5\n"));
    assert!(text.contains("\n1,2/63\n"));
    assert_eq!(text.lines().count(), 13); // header + 12 values

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("orbit.csv");
    let mut with_out: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap();
    with_out.extend(["--out", path_str]);
    let out2 = rde5(&with_out);
    assert!(out2.status.success());
    assert!(stdout(&out2).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn simulate_marks_forbidden_orbits() {
    let out = rde5(&["simulate", "--ic", "1,1,1,1,1", "--a", "-1", "--b", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# forbidden_at=1 cause=zero_bracket"), "{text}");
}

#[test]
fn u_form_labels_from_zero() {
    let out = rde5(&[
        "simulate", "--ic", "1,1,1,1,1", "--a", "1/2", "--b", "1/2", "--form", "u", "--n-max", "6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,u_n\n0,1\n1,1\n"));
    assert!(text.trim_end().ends_with("6,1"));
}

#[test]
fn compare_passes_exactly_in_rational_mode() {
    let out = rde5(&[
        "compare", "--ic", "2/3,-1/2,5,7/4,1/2", "--a", "periodic:2,-1/3", "--b", "1", "--n-max",
        "60",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("max_discrepancy: 0 (exact)"));
    assert!(text.contains("status: PASS"));
}

#[test]
fn compare_float_backend_within_tolerance() {
    let out = rde5(&[
        "compare", "--ic", "0.8,1.3,0.7,1.9,1.1", "--a", "1.5", "--b", "0.5", "--backend",
        "float", "--n-max", "60",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("status: PASS"));
}

#[test]
fn compare_reports_forbidden_prefix() {
    // all-ones seeds with a = -1 die at x[1]; the seed prefix still matches
    let out = rde5(&["compare", "--ic", "1,1,1,1,1", "--a", "-1", "--b", "1", "--n-max", "20"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("orbit: forbidden at x[1]"), "{text}");
    assert!(text.contains("status: PASS"), "{text}");
}

#[test]
fn period_expectation_drives_exit_code() {
    let ex1 = ["--ic", "1/5,9,5,7,2", "--a", "-1", "--b", "1"];
    let pass = rde5(&[&["period"], &ex1[..], &["--expect", "6"]].concat());
    assert!(pass.status.success());
    let fail = rde5(&[&["period"], &ex1[..], &["--expect", "4"]].concat());
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains("expected period 4: FAIL"));
}

#[test]
fn period_reports_none_for_decaying_orbit() {
    let out = rde5(&[
        "period", "--ic", "1,1,1,1,1", "--a", "1", "--b", "1", "--backend", "float",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("period: none"));
}

#[test]
fn symcheck_zero_samples_is_a_vacuous_pass() {
    let out = rde5(&["symcheck", "--samples", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("warning"));
    assert!(text.contains("status: PASS"));
}

#[test]
fn symcheck_is_deterministic_per_seed() {
    let a = rde5(&["symcheck", "--seed", "5", "--samples", "64"]);
    let b = rde5(&["symcheck", "--seed", "5", "--samples", "64"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn converge_rejects_non_unit_a() {
    let out = rde5(&["converge", "--ic", "1,1,1,1,1", "--a", "2", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("a = 1"));
}

#[test]
fn converge_reports_forbidden_orbit_as_failed_check() {
    let out = rde5(&["converge", "--ic", "-0.25,1,1,1,1", "--a", "1", "--b", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("status: forbidden"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "ic = \"1/5,9,5,7,2\"\na = \"-1\"\nb = \"1\"\nn_max = 7\n").unwrap();
    let path_str = path.to_str().unwrap();

    let from_file = rde5(&["simulate", "--config", path_str]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file).lines().count(), 13);

    let flag_wins = rde5(&["simulate", "--config", path_str, "--n-max", "1"]);
    assert!(flag_wins.status.success());
    assert_eq!(stdout(&flag_wins).lines().count(), 7);
}

#[test]
fn config_errors_exit_two() {
    let bad_ic = rde5(&["simulate", "--ic", "1,2,3", "--a", "1", "--b", "1"]);
    assert_eq!(bad_ic.status.code(), Some(2));
    assert!(stderr(&bad_ic).contains("ic"));

    let zero_coeff = rde5(&["simulate", "--ic", "1,1,1,1,1", "--a", "0", "--b", "1"]);
    assert_eq!(zero_coeff.status.code(), Some(2));

    let short_explicit = rde5(&[
        "compare", "--ic", "1,1,1,1,1", "--a", "explicit:1,2", "--b", "1", "--n-max", "40",
    ]);
    assert_eq!(short_explicit.status.code(), Some(2));
    assert!(stderr(&short_explicit).contains("no index"));

    let missing = rde5(&["simulate", "--ic", "1,1,1,1,1", "--a", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("`b`"));
}
