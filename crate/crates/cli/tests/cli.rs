use std::process::Command;

use serde_json::Value;
use srf_cli::report::{parse_csv, to_csv, Report, Status, CHECK_COLUMNS};
use srf_cli::{run_cli, run_to_report};

fn srf(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_srf")).args(args).output().expect("binary runs")
}

fn argv<'a>(args: &'a [&'a str]) -> impl Iterator<Item = &'a str> {
    std::iter::once("srf").chain(args.iter().copied())
}

#[test]
fn gram_report_is_json_on_stdout() {
    let out = srf(&["gram", "--y", "0.1", "--support", "0,1,2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.schema_version, "1");
    assert_eq!(report.status, Status::Pass);
    let m = &report.results["matrix"];
    assert_eq!(m.as_array().unwrap().len(), 3);
    assert_eq!(m[0][0]["value"], Value::from("1.0000000000000000000000000000000000000000000000000000000000000000000000000000000"));
    assert_eq!(m[0][1]["bits"], Value::from(256));
    assert_eq!(m[0][1], m[1][0]);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bounds", "--y", "0.6", "--n", "4"][..],
        &["gram"][..],
        &["gram", "--y", "0.1", "--srf", "10"][..],
        &["gram", "--y", "0.1", "--precision-bits", "32"][..],
        &["minimax", "--y", "0.2", "--sigma", "0"][..],
        &["nonsense"][..],
    ] {
        let out = srf(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn budget_overflow_is_a_computational_error() {
    let code = run_cli(argv(&["epsilon", "--y", "0.1", "--k", "8", "--mode", "exhaustive", "--span", "200"]));
    assert_eq!(code, 3);
}

#[test]
fn failed_checks_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    let code = run_cli(argv(&["scaling", "--k", "3", "--srf-grid", "2.1,2.2,2.3,2.4", "--output", p]));
    assert_eq!(code, 1);
    let report = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.status, Status::Fail);
}

#[test]
fn scaling_slope_for_two_atoms() {
    let (report, _) = run_to_report(argv(&["scaling", "--k", "2", "--srf-grid", "8,12,16,24,32"])).unwrap();
    let slope = report.results["slope"].as_f64().unwrap();
    assert!((slope + 3.0).abs() < 0.15, "{slope}");
    assert_eq!(report.status, Status::Pass);
}

#[test]
fn json_round_trip_is_lossless() {
    let (report, _) = run_to_report(argv(&["bounds", "--y", "0.1", "--n", "2", "--seed", "4"])).unwrap();
    let text = report.to_json().unwrap();
    assert_eq!(Report::from_json(&text).unwrap(), report);
}

#[test]
fn csv_round_trip_matches_checks() {
    let (report, outcome) = run_to_report(argv(&["minimax", "--y", "0.2", "--k", "1", "--sigma", "1e-4"])).unwrap();
    let table = parse_csv(&to_csv(&outcome).unwrap()).unwrap();
    assert_eq!(table.columns, CHECK_COLUMNS);
    assert_eq!(table.rows.len(), report.checks.len());
    for (row, check) in table.rows.iter().zip(&report.checks) {
        assert_eq!(row[0], check.name);
        assert_eq!(row[1], check.lhs.value);
        assert_eq!(row[2], check.rhs.value);
        assert_eq!(row[3], check.slack.value);
        assert_eq!(row[4], check.satisfied.to_string());
    }
}

#[test]
fn scaling_csv_is_a_plot_table() {
    let (_, outcome) = run_to_report(argv(&["scaling", "--k", "1", "--format", "csv"])).unwrap();
    let table = parse_csv(&to_csv(&outcome).unwrap()).unwrap();
    assert_eq!(table.columns, ["srf", "eps2k"]);
    assert_eq!(table.rows.len(), 5);
    let eps: Vec<f64> = table.rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(eps.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn identical_configs_give_identical_reports() {
    let args = ["bounds", "--y", "0.15", "--n", "2", "--seed", "9"];
    let (mut a, _) = run_to_report(argv(&args)).unwrap();
    let (mut b, _) = run_to_report(argv(&args)).unwrap();
    a.timestamp.clear();
    b.timestamp.clear();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn srf_and_inverse_y_give_identical_payloads() {
    for cmd in ["smin", "epsilon", "adversary"] {
        let (a, _) = run_to_report(argv(&[cmd, "--srf", "8", "--k", "2", "--n", "3"])).unwrap();
        let (b, _) = run_to_report(argv(&[cmd, "--y", "1/8", "--k", "2", "--n", "3"])).unwrap();
        let (c, _) = run_to_report(argv(&[cmd, "--y", "0.125", "--k", "2", "--n", "3"])).unwrap();
        assert_eq!(a.results, b.results, "{cmd}");
        assert_eq!(a.results, c.results, "{cmd}");
        assert_eq!(a.checks, b.checks, "{cmd}");
        assert_eq!(a.config.y_exact.as_deref(), Some("1/8"));
    }
}

#[test]
fn precision_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_srf"))
        .args(["smin", "--y", "0.1", "--support", "0,1"])
        .env("SRF_PRECISION_BITS", "128")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.config.precision_bits, 128);
    assert_eq!(report.results["sigma_min"]["bits"], Value::from(128));
    let sigma: f64 = report.results["sigma_min"]["value"].as_str().unwrap().parse().unwrap();
    assert!((sigma - 0.127_938_879_6).abs() < 1e-10);
}

#[test]
fn recover_reports_a_feasible_estimate() {
    let (report, _) = run_to_report(argv(&["recover", "--y", "0.2", "--k", "2", "--n", "6", "--sigma", "1e-3", "--seed", "1"])).unwrap();
    assert_eq!(report.status, Status::Pass);
    let est = &report.results["estimate"];
    assert_eq!(est["re"].as_array().unwrap().len(), est["support"].as_array().unwrap().len());
    assert_eq!(report.config.seed, 1);
}

#[test]
fn szego_point_query() {
    let (report, _) = run_to_report(argv(&["szego", "--y", "0.1", "--n", "3", "--point", "3,0.5"])).unwrap();
    let k_inf: f64 = report.results["kernel_at_infinity"]["value"].as_str().unwrap().parse().unwrap();
    let c = (std::f64::consts::PI * 0.05).sin();
    assert!((k_inf - 0.2 / c).abs() < 1e-12);
    assert_eq!(report.results["leading_coeffs"].as_array().unwrap().len(), 4);
    assert!(report.results["point"]["kernel_diagonal"]["re"]["value"].is_string());
    assert_eq!(run_cli(argv(&["szego", "--y", "0.1", "--point", "1,0"])), 2);
}
