use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use affine_hls::report::ChainReport;
use affine_hls::specialfns::gamma_fn;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affine-hls")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn report_of(out: &Output) -> ChainReport {
    serde_json::from_value(json_of(out)["report"].clone()).expect("report parses")
}

fn csv_rows(text: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text).records().map(|r| r.unwrap()).collect()
}

#[test]
fn simplex_exponential_pair_is_near_equality() {
    let out = run(&["verify", "thm13", "--n", "1", "--alpha", "0.5", "--f", "simplex-exp", "--h", "simplex-exp"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report_of(&out);
    assert!(rep.pass);
    assert!(rep.near_equality[0]);
}

#[test]
fn disk_volume_identity() {
    let out = run(&["verify", "identity-3b", "--n", "2", "--f", "ball-indicator", "--h", "ball-indicator"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report_of(&out);
    for v in &rep.values {
        assert!((v - PI * PI / 2.0).abs() < 5e-3 * PI * PI / 2.0, "{v}");
    }
}

#[test]
fn alpha_equal_to_n_is_a_regime_error() {
    let out = run(&["verify", "thm11", "--n", "1", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("regime"));
    assert!(out.stdout.is_empty());
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["verify", "thm11", "--n", "4", "--alpha", "1"][..],
        &["verify", "thm11", "--n", "1", "--alpha", "0.5", "--f", "lorentzian"],
        &["verify", "thm13", "--n", "1", "--f", "gaussian"],
        &["verify", "corollary-s", "--n", "1", "--alpha", "0.5"],
        &["verify", "riesz", "--n", "1", "--f", "gaussian"],
        &["verify", "bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_chain_exits_1() {
    // 2 samples leave the Monte Carlo side far from the exact one
    let out = run(&["verify", "identity-3a", "--n", "1", "--alpha", "0.5", "--mc-samples", "2", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!report_of(&out).pass);
}

#[test]
fn alpha_sweep_gives_one_passing_row_each() {
    let out = run(&["sweep", "thm11", "--n", "1", "--alphas", "0.25,0.5,0.75", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[r.len() - 2] == "true"));
}

#[test]
fn inclusion_sweep_reproduces_the_closed_form_ratio() {
    let alphas = [0.5f64, 1.0, 2.0, 4.0];
    let out = run(&["sweep", "inclusion", "--n", "1", "--alphas", "0.5,1,2,4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(&out.stdout[..]);
    let col = reader.headers().unwrap().iter().position(|h| h == "term2").unwrap();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    let mut last = f64::INFINITY;
    for (a, row) in alphas.iter().zip(&rows) {
        let v: f64 = row[col].parse().unwrap();
        let closed = (a + 1.0).powf(-1.0 / a) / gamma_fn(a + 1.0).unwrap().powf(1.0 / a);
        assert!((v - closed).abs() < 1e-8, "alpha {a}: {v} vs {closed}");
        assert!(v < last);
        last = v;
    }
}

#[test]
fn parameter_sweep_and_row_failures() {
    let out = run(&[
        "sweep",
        "thm13",
        "--n",
        "1",
        "--alpha",
        "0.5",
        "--f",
        "gaussian",
        "--h",
        "gaussian",
        "--param",
        "f.variance",
        "--values",
        "0.5,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][1]["parameters"], "n=1;alpha=0.5;f.variance=2");

    let out = run(&["sweep", "thm11", "--n", "1", "--alphas", "0.5,1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 2);
    assert!(rows[1][rows[1].len() - 1].contains("regime"));
}

#[test]
fn empty_sweep_grid_exits_2() {
    assert_eq!(run(&["sweep", "thm11", "--n", "1", "--alpha", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "thm11", "--n", "1", "--alpha", "0.5", "--param", "f.variance"]).status.code(), Some(2));
}

#[test]
fn reports_are_reproducible_and_embed_the_config() {
    let args = ["verify", "identity-3a", "--n", "1", "--alpha", "0.5", "--k", "cross-polytope", "--seed", "11"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["quad"]["seed"], 11);
    assert_eq!(v["config"]["k"]["body"], "cross-polytope");
    assert_eq!(v["config"]["grid"], 2);
}

#[test]
fn toml_config_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
n = 2
alpha = 1.0
grid = 16

[f]
family = "gaussian"
variance = 0.5

[h]
family = "ball-indicator"
radius = 0.8

[quad]
seed = 5
"#,
    )
    .unwrap();
    let report = dir.path().join("out.json");
    let out = run(&[
        "verify",
        "thm11",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "0.5",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["alpha"], 0.5);
    assert_eq!(v["config"]["grid"], 16);
    assert_eq!(v["config"]["f"]["variance"], 0.5);
    assert_eq!(v["config"]["quad"]["seed"], 5);
    assert_eq!(v["report"]["metadata"]["params"]["alpha"], 0.5);

    std::fs::write(&cfg, "n = 2\nunknown_key = 1\n").unwrap();
    assert_eq!(run(&["verify", "thm11", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = Path::new("/nonexistent/run.toml");
    assert_eq!(run(&["verify", "thm11", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_verify_has_header_and_one_row() {
    let out = run(&[
        "verify",
        "dual-mixed",
        "--n",
        "3",
        "--alpha",
        "1.5",
        "--k",
        "ellipsoid:axes=[1, 2, 0.5]",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("chain,parameters,label0"));
}

#[test]
fn indicator_export_is_a_closed_polyline() {
    let out = run(&["body-export", "--n", "2", "--alpha", "1", "--grid", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let poly = v["body"]["polyline"].as_array().unwrap();
    assert_eq!(poly.len(), 33);
    assert_eq!(poly[0], poly[32]);
    let radii = v["body"]["body"]["values"].as_array().unwrap();
    assert!(radii.iter().all(|r| r.as_f64().unwrap() > 0.0));
}

#[test]
fn gaussian_pair_exports_an_ellipsoid() {
    let out = run(&["body-export", "--n", "2", "--alpha", "1", "--f", "gaussian", "--h", "gaussian", "--grid", "32"]);
    let v = json_of(&out);
    assert!(v["body"]["roundness"]["max_relative_deviation"].as_f64().unwrap() < 1e-6);
    let box_pair = json_of(&run(&["body-export", "--n", "2", "--alpha", "1", "--grid", "32"]));
    assert!(box_pair["body"]["roundness"]["max_relative_deviation"].as_f64().unwrap() > 1e-2);
}

#[test]
fn three_dimensional_export_is_a_latitude_longitude_grid() {
    let out = run(&[
        "body-export",
        "--n",
        "3",
        "--alpha",
        "1",
        "--f",
        "ball-indicator",
        "--h",
        "ball-indicator",
        "--grid",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let ll = &v["body"]["lat_lon"];
    let (rings, meridians) = (ll["cos_theta"].as_array().unwrap().len(), ll["phi"].as_array().unwrap().len());
    let radii = ll["radii"].as_array().unwrap();
    assert_eq!(radii.len(), rings);
    assert!(radii.iter().all(|r| r.as_array().unwrap().len() == meridians));
}

#[test]
fn radial_mean_export() {
    let out = run(&["body-export", "--n", "1", "--alpha", "2", "--body", "radial-mean"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["body"]["kind"], "radial-mean");
    // ρ^2 = ∫_0^1 (1 - x)^2 dx on the unit interval
    for r in v["body"]["body"]["values"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-8);
    }
}
