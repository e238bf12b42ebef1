//! End-to-end checks of the command-line interface: exit codes, output
//! schemas, reproducibility, and the field-file round trip.

use std::path::Path;
use std::process::{Command, Output};

fn beamtomo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamtomo"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn tomogram_single_query_prints_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = beamtomo(
        &["tomogram", "--n", "1", "--m", "1", "--sigma0", "1", "--query", "0,0,1,0,0,1"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn tomogram_query_list_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("queries.txt"),
        "# two probes\n0,1,1,0,1,1\n0.5,1,0.5,-0.5,1,0.5\n",
    )
    .unwrap();
    let out = beamtomo(
        &[
            "tomogram", "--n", "0", "--m", "0", "--sigma0", "1.4142135623730951",
            "--queries", "queries.txt", "--out", "scan.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("X1,mu1,nu1,X2,mu2,nu2,w"));
    assert_eq!(text.lines().count(), 3);
    // first row: the ground-mode Fresnel point 1/(2 pi)
    let w: f64 = text.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((w - 1.0 / std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn rsurface_is_reproducible_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "rsurface", "--n", "0", "--m", "0", "--sigma0", "1", "--grid", "4", "--out", "r.csv",
    ];
    assert!(beamtomo(&args, dir.path()).status.success());
    let first = std::fs::read(dir.path().join("r.csv")).unwrap();
    assert!(beamtomo(&args, dir.path()).status.success());
    let second = std::fs::read(dir.path().join("r.csv")).unwrap();
    assert_eq!(first, second, "identical config must give byte-identical output");

    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().next(), Some("theta1,theta2,R"));
    assert_eq!(text.lines().count(), 17);

    let out = beamtomo(
        &[
            "rsurface", "--n", "0", "--m", "0", "--sigma0", "1", "--grid", "4",
            "--format", "json", "--out", "r.json",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(doc["grid_n"], 4);
    assert_eq!(doc["values"].as_array().unwrap().len(), 16);
    assert!(doc["min"].as_f64().unwrap() >= -1e-4);
}

#[test]
fn check_reports_saturating_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let out = beamtomo(
        &["check", "--n", "0", "--m", "0", "--sigma0", "1.41421356", "--grid", "6"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("R ≈ 0 everywhere"), "missing saturation note:\n{text}");
    assert_eq!(text.matches(": pass").count(), 6);
}

#[test]
fn exit_codes_for_bad_usage() {
    let dir = tempfile::tempdir().unwrap();
    // unknown flag
    let out = beamtomo(&["tomogram", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    // field and analytic mode are mutually exclusive
    std::fs::write(dir.path().join("f.field"), "x1: 0 1 2\nx2: 0 1 2\n1 0 1 0 1 0 1 0\n").unwrap();
    let out = beamtomo(
        &["tomogram", "--field", "f.field", "--n", "0", "--query", "0,1,1,0,1,1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    // no source at all
    let out = beamtomo(&["tomogram", "--query", "0,1,1,0,1,1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    // malformed query
    let out = beamtomo(
        &["tomogram", "--n", "0", "--m", "0", "--sigma0", "1", "--query", "0,0,0,0,0,0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    // bad thread cap
    let out = Command::new(env!("CARGO_BIN_EXE_beamtomo"))
        .args(["check", "--n", "0", "--m", "0", "--sigma0", "1"])
        .env("BEAMTOMO_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sampled_field_round_trips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = beamtomo(
        &[
            "sample", "--n", "1", "--m", "0", "--sigma0", "1",
            "--grid-nodes", "256", "--out", "mode.field",
        ],
        dir.path(),
    );
    assert!(out.status.success());

    // the export parses back to identical bits
    let text = std::fs::read_to_string(dir.path().join("mode.field")).unwrap();
    let field = beamtomo::parse_field(&text).unwrap();
    assert_eq!(beamtomo::write_field(&field), text);

    // tomogram through the file route matches the closed form
    let query = "0.5,1,0.8,-0.2,0.6,1.1";
    let from_file = beamtomo(
        &["tomogram", "--field", "mode.field", "--query", query],
        dir.path(),
    );
    assert!(from_file.status.success());
    let from_mode = beamtomo(
        &["tomogram", "--n", "1", "--m", "0", "--sigma0", "1", "--query", query],
        dir.path(),
    );
    let a: f64 = stdout(&from_file).trim().parse().unwrap();
    let b: f64 = stdout(&from_mode).trim().parse().unwrap();
    assert!((a - b).abs() < 1e-6, "field route {a} vs closed form {b}");
}

#[test]
fn entropy_styles_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--n", "0", "--m", "0", "--sigma0", "1.4142135623730951"];
    // optical
    let mut args = vec!["entropy"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--theta1", "0.4", "--theta2", "1.2"]);
    let out = beamtomo(&args, dir.path());
    assert!(out.status.success());
    let h: f64 = stdout(&out).split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((h - beamtomo::LN_PI_E).abs() < 1e-5);

    // Fresnel via --nu1/--nu2 alone, JSON to file
    let mut args = vec!["entropy"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--nu1", "1", "--nu2", "1", "--format", "json", "--out", "h.json"]);
    assert!(beamtomo(&args, dir.path()).status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("h.json")).unwrap()).unwrap();
    assert_eq!(doc["kind"], "fresnel");
    let expect = (std::f64::consts::TAU * std::f64::consts::E).ln();
    assert!((doc["value"].as_f64().unwrap() - expect).abs() < 1e-5);

    // incomplete parameter style
    let mut args = vec!["entropy"];
    args.extend_from_slice(&base);
    args.extend_from_slice(&["--mu1", "1"]);
    assert_eq!(beamtomo(&args, dir.path()).status.code(), Some(1));
}

#[test]
fn reconstruct_profile_matches_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = beamtomo(
        &[
            "reconstruct", "--n", "0", "--sigma0", "1.4142135623730951",
            "--xmax", "1", "--points", "5", "--out", "recon.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("recon.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("x,intensity,expected"));
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        assert!((cols[1] - cols[2]).abs() < 1e-3, "profile off at x = {}", cols[0]);
    }
}
