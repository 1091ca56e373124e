use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lvrlab::report::RunManifest;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn lvrlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lvrlab"))
        .args(args)
        .output()
        .unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn negative_sigma_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lvrlab(&["simulate", "--sigma", "-0.1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("sigma"), "{}", text(&o.stderr));
}

#[test]
fn missing_piecewise_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let o = lvrlab(&[
        "simulate",
        "--cost-kind",
        "piecewise",
        "--cost-alpha",
        "1",
        "--cost-slope",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("cost.c"), "{}", text(&o.stderr));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[gbm]\nsigmaa = 0.3\n").unwrap();
    let o = lvrlab(&["simulate", "-c", cfg.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("sigmaa"));
}

#[test]
fn simulate_writes_outputs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = lvrlab(&[
        "simulate",
        "-c",
        fixtures().join("classical.toml").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--paths",
        "20",
        "--steps-per-path",
        "50",
        "--traces",
        "2",
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("metric,mean,stderr,paths,steps\n"));
    assert!(summary.lines().nth(1).unwrap().ends_with(",20,50"));
    let table = std::fs::read_to_string(out.join("lvr_table.csv")).unwrap();
    assert!(table.starts_with("sigma,r,ell_over_V_theory,ell_over_V_mc,stderr\n"));
    assert!(table.lines().nth(1).unwrap().contains(",inf,"));
    let trace = std::fs::read_to_string(out.join("traces/path_00001.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("t,Q"));
    assert_eq!(trace.lines().count(), 52);
    assert!(!out.join("traces/path_00002.csv").exists());

    let manifest = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.command, "simulate");
    assert_eq!(manifest.config.run.paths, 20);
    let summary_entry = manifest.outputs.iter().find(|f| f.file == "summary.csv").unwrap();
    assert_eq!(summary_entry.sha256, lvrlab::report::sha256_hex(summary.as_bytes()));
}

#[test]
fn tabulated_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = lvrlab(&[
        "simulate",
        "-c",
        fixtures().join("tabulated_pool.toml").to_str().unwrap(),
        "-o",
        dir.path().to_str().unwrap(),
        "--paths",
        "10",
        "--steps-per-path",
        "100",
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(dir.path().join("summary.csv").exists());
    // no closed-form ℓ/V row for a tabulated pool
    assert!(!dir.path().join("lvr_table.csv").exists());
}

#[test]
fn converge_without_volatility_has_no_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let o = lvrlab(&[
        "converge",
        "--sigma",
        "0",
        "--paths",
        "4",
        "--steps",
        "10,100",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for row in &rows {
        for (name, v) in header.iter().zip(row).skip(2) {
            assert_eq!(*v, 0.0, "{name}");
        }
    }
    let fits = std::fs::read_to_string(dir.path().join("fits.csv")).unwrap();
    assert!(fits.contains("convention_gap,nan,nan,nan"));
}

#[test]
fn converge_needs_two_step_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = lvrlab(&["converge", "--steps", "100", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o.stderr).contains("steps"));
}

#[test]
fn depth_reports_fixture_slopes() {
    let o = lvrlab(&[
        "depth",
        fixtures().join("linear_book.csv").to_str().unwrap(),
        fixtures().join("top_heavy_book.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let out = text(&o.stdout);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "mid,slope,r2,n_levels,window_bps");
    assert_eq!(lines.len(), 3);
    let fields: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((fields[1] - 10.0).abs() < 1e-9);
    assert_eq!(fields[4], 50.0);
}

#[test]
fn depth_window_is_propagated() {
    let o = lvrlab(&[
        "depth",
        "--window-bps",
        "25",
        fixtures().join("linear_book.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let out = text(&o.stdout);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[3], 4.0);
    assert_eq!(row[4], 25.0);
}

#[test]
fn depth_reports_bad_files_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "side,price,size\nbid,99.9,1\nbid,oops,1\nask,100.1,1\n").unwrap();
    let good = fixtures().join("linear_book.csv");

    let o = lvrlab(&["depth", good.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(text(&o.stdout).lines().count(), 2);
    let err = text(&o.stderr);
    assert!(err.starts_with("errors:"));
    assert!(err.contains("bad.csv") && err.contains("line 3"), "{err}");

    let o = lvrlab(&["depth", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn crossed_book_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let crossed = dir.path().join("crossed.csv");
    std::fs::write(
        &crossed,
        "side,price,size\nbid,100.2,1\nbid,100.1,1\nask,100.0,1\nask,100.3,1\n",
    )
    .unwrap();
    let o = lvrlab(&["depth", crossed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("crossed"), "{}", text(&o.stderr));
}
