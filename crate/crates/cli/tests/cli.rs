//! End-to-end checks of the binary: flag handling, exit codes, output
//! schemas and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nh-lattice"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 output")
}

type ParsedCsv = (Vec<(String, String)>, Vec<String>, Vec<Vec<String>>);

/// Minimal parser for the emitted CSV schema: `# key=value` lines, a
/// header row, then comma-separated data rows.
fn parse_csv(text: &str) -> ParsedCsv {
    let mut metadata = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once('=').expect("metadata key=value");
            metadata.push((k.to_string(), v.to_string()));
        } else if header.is_none() {
            header = Some(line.split(',').map(str::to_string).collect());
        } else {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (metadata, header.expect("header row"), rows)
}

#[test]
fn spectrum_family_rho_one_is_real_ring() {
    let out = run(&[
        "spectrum", "--n", "10", "--t", "1", "--q", "4", "--rho", "1", "--phi", "0",
    ]);
    assert!(out.status.success());
    let (metadata, header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header, vec!["index", "re", "im", "residual"]);
    assert_eq!(rows.len(), 10);
    assert!(metadata.iter().any(|(k, _)| k == "derived_q"));
    assert!(metadata.iter().any(|(k, _)| k == "derived_t"));

    let mut res: Vec<f64> = Vec::new();
    for row in &rows {
        let im: f64 = row[2].parse().unwrap();
        assert!(im.abs() < 1e-10, "im = {im}");
        res.push(row[1].parse().unwrap());
    }
    // Multiset {2 cos(2 pi m / 10)}.
    let mut expected: Vec<f64> =
        (0..10).map(|m| 2.0 * (2.0 * std::f64::consts::PI * m as f64 / 10.0).cos()).collect();
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    res.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (a, b) in res.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn spectrum_direct_form_works() {
    let out = run(&[
        "spectrum", "--n", "3", "--tl", "0.5", "--tr", "2", "--al", "1", "--ar", "1",
    ]);
    assert!(out.status.success());
    let (_, _, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(rows.len(), 3);
}

#[test]
fn mixed_parameter_groups_are_rejected() {
    let out = run(&[
        "spectrum", "--n", "4", "--t", "1", "--q", "4", "--rho", "1", "--phi", "0", "--tl", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_parameters_are_rejected() {
    let out = run(&["spectrum", "--n", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_rho_exits_with_validation_code() {
    let out = run(&[
        "spectrum", "--n", "4", "--t", "1", "--q", "4", "--rho", "3.5", "--phi", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn range_guard_violation_exits_with_validation_code() {
    let out = run(&[
        "spectrum", "--n", "40", "--t", "1", "--q", "4", "--rho", "1", "--phi", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn complex_arguments_parse_without_whitespace() {
    let out = run(&[
        "spectrum", "--n", "6", "--t", "1", "--q", "4+3.141592653589793i", "--rho", "0.5",
        "--phi", "1.0",
    ]);
    assert!(out.status.success());
    let out = run(&["spectrum", "--n", "6", "--t", "1", "--q", "bogus", "--rho", "0.5", "--phi", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ep_scan_reports_the_four_site_collapse() {
    let out = run(&[
        "ep", "--n", "4", "--t", "1", "--q", "4", "--scan-r", "-5", "0", "--steps", "500",
    ]);
    assert!(out.status.success());
    let (_, header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(
        header,
        vec!["param", "min_gap", "cond_v", "classification", "delta_re", "delta_im"]
    );
    assert_eq!(rows.len(), 1);
    let param: f64 = rows[0][0].parse().unwrap();
    assert!((param + 3.0).abs() < 1e-6, "param {param}");
    let delta_re: f64 = rows[0][4].parse().unwrap();
    assert!(delta_re.abs() < 1e-8);
}

#[test]
fn sweep_emits_rows_for_every_branch_and_point() {
    let out = run(&[
        "sweep", "--n", "6", "--t", "1", "--q", "4", "--phi", "0", "--scan-rho", "0", "2",
        "--steps", "21",
    ]);
    assert!(out.status.success());
    let (metadata, header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(header, vec!["param", "branch", "re", "im", "degenerate_flag"]);
    let grid_points: usize = metadata
        .iter()
        .find(|(k, _)| k == "grid_points")
        .map(|(_, v)| v.parse().unwrap())
        .unwrap();
    assert!(grid_points >= 21);
    assert_eq!(rows.len(), grid_points * 6);
}

#[test]
fn sweep_rejects_conflicting_axis_flags() {
    let out = run(&[
        "sweep", "--n", "6", "--t", "1", "--q", "4", "--rho", "1", "--phi", "0", "--scan-rho",
        "0", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn skin_table_has_densities_and_rates() {
    let out = run(&[
        "skin", "--n", "10", "--t", "1", "--q", "4", "--rho", "0.5", "--phi", "0",
    ]);
    assert!(out.status.success());
    let (metadata, header, rows) = parse_csv(&stdout_of(&out));
    assert_eq!(
        header,
        vec!["site", "density_right", "density_left", "rate_right", "rate_left"]
    );
    assert_eq!(rows.len(), 10);
    let total: f64 = rows.iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let rate: f64 = rows[0][3].parse().unwrap();
    assert!((rate - 2.0).abs() < 0.04);
    assert!(metadata.iter().any(|(k, v)| k == "side_right" && v == "left"));
}

#[test]
fn json_format_carries_metadata_and_rows() {
    let out = run(&[
        "spectrum", "--n", "4", "--t", "1", "--q", "4", "--rho", "1", "--phi", "0", "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["metadata"]["command"], "spectrum");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    assert!(doc["rows"][0]["re"].is_f64());
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    let args = |path: &Path| {
        vec![
            "sweep".to_string(),
            "--n".into(),
            "8".into(),
            "--t".into(),
            "1".into(),
            "--q".into(),
            "4+3.141592653589793i".into(),
            "--phi".into(),
            "0".into(),
            "--scan-rho".into(),
            "0".into(),
            "2".into(),
            "--steps".into(),
            "51".into(),
            "--out".into(),
            path.to_str().unwrap().into(),
        ]
    };
    assert!(bin().args(args(&path_a)).status().unwrap().success());
    assert!(bin().args(args(&path_b)).status().unwrap().success());
    let a = std::fs::read(&path_a).unwrap();
    let b = std::fs::read(&path_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn thread_env_var_is_validated_and_results_unchanged() {
    let bad = bin()
        .env("NH_LATTICE_THREADS", "zero")
        .args(["spectrum", "--n", "4", "--t", "1", "--q", "4", "--rho", "1", "--phi", "0"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));

    let args = [
        "sweep", "--n", "6", "--t", "1", "--q", "4", "--phi", "0", "--scan-rho", "0", "2",
        "--steps", "31",
    ];
    let single = bin().env("NH_LATTICE_THREADS", "1").args(args).output().unwrap();
    let quad = bin().env("NH_LATTICE_THREADS", "4").args(args).output().unwrap();
    assert!(single.status.success() && quad.status.success());
    assert_eq!(single.stdout, quad.stdout);
}

#[test]
fn verify_quick_passes_and_prints_per_property_lines() {
    let out = run(&["verify", "--quick"]);
    assert!(out.status.success(), "verify failed:\n{}", stdout_of(&out));
    let text = stdout_of(&out);
    let pass_lines = text.lines().filter(|l| l.starts_with("PASS ")).count();
    assert!(pass_lines >= 10, "only {pass_lines} PASS lines:\n{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
