//! End-to-end tests of the `neglab` binary: every subcommand, both output
//! formats, determinism, and the exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use neglab_core::gaussian::two_mode_squeezed;
use neglab_core::io::{gaussian_to_json, state_to_json};
use neglab_core::states::{ghz, maximally_entangled};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neglab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_fixture(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn bell_file(dir: &Path) -> PathBuf {
    write_fixture(
        dir,
        "bell.json",
        &state_to_json(&maximally_entangled(2).unwrap()),
    )
}

fn separable_file(dir: &Path) -> PathBuf {
    write_fixture(
        dir,
        "separable.json",
        r#"{"dims": [2, 2], "re": [[0.5,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0.5]], "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#,
    )
}

#[test]
fn measure_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = bell_file(dir.path());
    let out = run(&["measure", "--input", input.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert!((v["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert!((v["log_negativity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((v["trace_norm_pt"].as_f64().unwrap() - 2.0).abs() < 1e-10);
    assert_eq!(v["negative_eigvals"].as_array().unwrap().len(), 1);
}

#[test]
fn measure_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = bell_file(dir.path());
    let a = run(&["measure", "--input", input.to_str().unwrap()]);
    let b = run(&["measure", "--input", input.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn measure_separable_state_reports_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = separable_file(dir.path());
    let out = run(&["measure", "--input", input.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["negativity"].as_f64().unwrap(), 0.0);
    assert_eq!(v["log_negativity"].as_f64().unwrap(), 0.0);
}

#[test]
fn measure_csv_carries_version_header() {
    let dir = tempfile::tempdir().unwrap();
    let input = bell_file(dir.path());
    let out = run(&[
        "measure",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# neg-lab v1\n"));
    assert!(text.contains("negativity,log_negativity"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = bell_file(dir.path());
    let target = dir.path().join("report.json");
    let out = run(&[
        "measure",
        "--input",
        input.to_str().unwrap(),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert!((v["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn malformed_json_exits_2_with_single_line_record() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "broken.json", "{");
    let out = run(&["measure", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(err.trim_end()).unwrap();
    assert_eq!(v["error"], "parse");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "extra.json",
        r#"{"dims": [2], "re": [[1.0,0],[0,0]], "im": [[0,0],[0,0]], "comment": "?"}"#,
    );
    let out = run(&["measure", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_violations_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(
        dir.path(),
        "nonpsd.json",
        r#"{"dims": [2], "re": [[2.0,0],[0,-1.0]], "im": [[0,0],[0,0]]}"#,
    );
    let out = run(&["measure", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim_end()).unwrap();
    assert_eq!(v["error"], "invariant");
    assert!(v["message"].as_str().unwrap().contains("eigenvalue"));
}

#[test]
fn gaussian_two_mode_squeezed_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let lambda: f64 = 3.0 / 5.0;
    let cov = two_mode_squeezed(lambda.atanh()).unwrap();
    let input = write_fixture(dir.path(), "tms.json", &gaussian_to_json(&cov));
    let out = run(&["gaussian", "--input", input.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert!((v["log_negativity"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["physical"], true);
    let quartic = v["two_mode"]["quartic_pt_spectrum"].as_array().unwrap();
    assert!((quartic[0].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((quartic[1].as_f64().unwrap() - 0.125).abs() < 1e-9);
}

#[test]
fn gaussian_rejects_wrong_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let cov = two_mode_squeezed(0.3).unwrap();
    let text = gaussian_to_json(&cov).replace("xpxp", "pxpx");
    let input = write_fixture(dir.path(), "ordering.json", &text);
    let out = run(&["gaussian", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_on_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = bell_file(dir.path());
    let out = run(&["bounds", "--input", input.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["teleport_distance_lb"].as_f64().unwrap(), 0.0);
    assert_eq!(v["singlet_fidelity_ub"].as_f64().unwrap(), 1.0);
    assert!((v["distillation_ub_bits"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn multi_on_ghz() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_fixture(dir.path(), "ghz3.json", &state_to_json(&ghz(3).unwrap()));
    let out = run(&["multi", "--input", input.to_str().unwrap()]);
    let v = stdout_json(&out);
    let rows = v["splittings"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let find = |label: &str| {
        rows.iter()
            .find(|r| r["splitting"] == label)
            .unwrap_or_else(|| panic!("missing splitting {label}"))
    };
    assert!((find("A-BC")["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(find("A-B;!C")["negativity"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn monotonicity_sweep_smoke() {
    let out = run(&["monotonicity", "--trials", "24", "--seed", "7"]);
    let v = stdout_json(&out);
    assert_eq!(v["trials"], 24);
    assert_eq!(v["violations"], 0);
    assert!(v["max_slack"].as_f64().unwrap() <= 1e-9);
    // Same seed, same bytes.
    let again = run(&["monotonicity", "--trials", "24", "--seed", "7"]);
    assert_eq!(out.stdout, again.stdout);
    // The seed is mandatory for sampling commands.
    let missing = run(&["monotonicity", "--trials", "5"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn sneg_both_cones_on_bell() {
    let dir = tempfile::tempdir().unwrap();
    let input = bell_file(dir.path());
    let out = run(&[
        "sneg",
        "--input",
        input.to_str().unwrap(),
        "--cone",
        "all",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["cone"], "all");
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-3);

    let dir2 = tempfile::tempdir().unwrap();
    let sep = separable_file(dir2.path());
    let out = run(&["sneg", "--input", sep.to_str().unwrap(), "--cone", "ppt"]);
    let v = stdout_json(&out);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}
