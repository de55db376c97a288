//! End-to-end runs of the installed binary: exit codes, output formats,
//! determinism, and the model-file path.

use std::path::PathBuf;
use std::process::{Command, Output};

fn combscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combscope"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(args: &[&str]) -> String {
    let out = combscope(args);
    assert!(
        out.status.success(),
        "run {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("output should be utf-8")
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["renewal", "--dist", "point:1", "--length", "500", "--format", "json"];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn json_output_passes_the_validator() {
    let text = stdout_of(&[
        "bernoulli",
        "--p",
        "0.6",
        "--half-width",
        "2048",
        "--format",
        "json",
    ]);
    let env = combscope_core::validate_envelope(&text).expect("envelope should validate");
    assert_eq!(env.model, "bernoulli");
    assert_eq!(env.params.get("p").map(String::as_str), Some("0.6"));
}

#[test]
fn csv_is_the_default_and_uses_the_long_layout() {
    let text = stdout_of(&["cantor", "--depth", "10"]);
    assert!(text.starts_with("# schema_version,1\n"), "got {:?}", &text[..40]);
    assert!(text.contains("\nx,series,value\n"));
    assert!(text.lines().any(|l| l.starts_with("# model,cantor")));
}

#[test]
fn grid_flag_controls_series_length() {
    // Distribution curves carry grid + 1 nodes so both endpoints appear.
    let text = stdout_of(&["cantor", "--depth", "8", "--grid", "50", "--format", "json"]);
    let env = combscope_core::validate_envelope(&text).unwrap();
    assert_eq!(env.series[0].grid.len(), 51);
}

#[test]
fn unknown_flags_exit_with_usage_error() {
    let out = combscope(&["tm", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rejected_model_parameters_exit_with_usage_error() {
    for args in [
        &["renewal", "--dist", "gamma:0"][..],
        &["renewal", "--dist", "cauchy:1"][..],
        &["bernoulli", "--p", "1.5"][..],
        &["fibonacci", "--mode", "random", "--tiles", "7"][..],
    ] {
        let out = combscope(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn lattice_renewal_warns_about_degenerate_frequencies_but_succeeds() {
    let text = stdout_of(&[
        "renewal",
        "--dist",
        "point:1",
        "--length",
        "300",
        "--format",
        "json",
    ]);
    let env = combscope_core::validate_envelope(&text).unwrap();
    assert!(!env.warnings.is_empty());
    assert!(env.warnings[0].contains("atom"));
}

#[test]
fn out_flag_writes_the_envelope_to_disk() {
    let path = tmp_path("ledrappier.json");
    let out = combscope(&[
        "ledrappier",
        "--size",
        "64",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    combscope_core::validate_envelope(&text).expect("file content should validate");
}

#[test]
fn palm_model_file_carries_specs_and_seed() {
    let path = tmp_path("palm_model.json");
    std::fs::write(
        &path,
        "{\"ground\": \"poisson:1\", \"marks\": \"const:2\", \"seed\": 9}\n",
    )
    .unwrap();
    let text = stdout_of(&[
        "palm",
        "--model",
        path.to_str().unwrap(),
        "--runs",
        "2",
        "--radius",
        "40",
        "--base",
        "35",
        "--format",
        "json",
    ]);
    let env = combscope_core::validate_envelope(&text).unwrap();
    assert_eq!(env.seed, Some(9));
    assert_eq!(env.params.get("marks").map(String::as_str), Some("const:2,0"));
}

#[test]
fn palm_model_file_with_unknown_keys_is_rejected() {
    let path = tmp_path("palm_model_bad.json");
    std::fs::write(&path, "{\"ground\": \"poisson:1\", \"marks\": \"unit\", \"sneed\": 1}\n")
        .unwrap();
    let out = combscope(&["palm", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_model_file_is_an_io_error() {
    let out = combscope(&["palm", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(3));
}
