use std::path::Path;
use std::process::{Command, Output};

use lsasc_harness::csv::parse_csv;

fn lsasc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lsasc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn no_arguments_prints_usage_and_fails() {
    let o = lsasc(&[]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stderr).to_string() + &stdout(&o);
    assert!(text.contains("Usage"), "{text}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = lsasc(&["ser-vs-snr", "--seed", "1", "--colour", "blue"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn analyze_independent_array() {
    let o = lsasc(&["analyze", "--profile", "etu", "--m", "100", "--independent"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("P0 = 0.01\n"), "{text}");
    assert!(text.contains("P_ISI = 0.0067"), "{text}");
    assert!(text.contains("lag"));
}

#[test]
fn analyze_rejects_bad_geometry() {
    let o = lsasc(&["analyze", "--m", "1", "--d-over-lambda", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_seed_is_a_config_error() {
    let o = lsasc(&["ser-vs-antennas", "--m", "16"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("ser.csv");
    let o = lsasc(&[
        "ser-vs-antennas",
        "--seed",
        "1",
        "--m",
        "8",
        "--trials",
        "1",
        "--symbols-per-trial",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));
}

fn run_to(path: &Path, extra: &[&str]) -> Vec<u8> {
    let mut args = vec!["ser-vs-snr", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = lsasc(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn config_file_with_flag_overrides_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small sweep\nm = 24\nd_over_lambda = 8\nsnr_db = -12, -6\nseed = 5\ntrials = 50\nsymbols_per_trial = 100\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = run_to(&dir.path().join("a.csv"), &["--config", cfg, "--trials", "6"]);
    let b = run_to(&dir.path().join("b.csv"), &["--config", cfg, "--trials", "6"]);
    assert_eq!(a, b);
    let points = parse_csv(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[0].x, -12.0);
    assert!(points.iter().all(|p| p.symbols == 600));
    assert!(points[1].ser <= points[0].ser);

    let c = run_to(
        &dir.path().join("c.csv"),
        &["--config", cfg, "--trials", "6", "--seed", "6"],
    );
    assert_ne!(a, c);
}

#[test]
fn csv_goes_to_stdout_without_out() {
    let o = lsasc(&[
        "ser-vs-length",
        "--seed",
        "9",
        "--m",
        "16",
        "--d-over-lambda",
        "2,independent",
        "--snr-db",
        "-10",
        "--trials",
        "2",
        "--symbols-per-trial",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let points = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[1].x, f64::INFINITY);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ser-vs-length"));
}

#[test]
fn noiseless_large_array_makes_no_errors() {
    let o = lsasc(&[
        "ser-vs-antennas",
        "--seed",
        "4",
        "--m",
        "4096",
        "--independent",
        "--snr-db",
        "inf",
        "--trials",
        "2",
        "--symbols-per-trial",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let points = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(points[0].errors, 0);
    assert_eq!(points[0].ser, 0.0);
}

#[test]
fn isi_validate_matches_closed_form() {
    let o = lsasc(&["isi-validate", "--seed", "7", "--m", "32", "--trials", "20000"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row[0], 32.0);
    assert!(row[3] < 0.05, "relative error {}", row[3]);
}

#[test]
fn isi_validate_sweep_rejects_swept_snr() {
    let o = lsasc(&["isi-validate", "--seed", "7", "--snr-db", "-10,-8"]);
    assert_eq!(o.status.code(), Some(1));
}
