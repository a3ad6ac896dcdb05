use std::path::{Path, PathBuf};
use std::process::Command;

use chernlab_cli::config::{validate_against, REPORT_SCHEMA};
use chernlab_cli::{exit, run, Suite};
use chernlab_core::registry::{self, EntryKind};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chernlab"))
}

fn report_value(suite: Suite, name: &str) -> (i32, Value) {
    let out = run(suite, &read_fixture(name), None);
    let v = serde_json::to_value(&out.report).unwrap();
    validate_against(REPORT_SCHEMA, &v).unwrap_or_else(|e| panic!("{name}: {e:?}"));
    (out.exit_code, v)
}

#[test]
fn fixtures_produce_schema_valid_reports() {
    for (suite, name, code) in [
        (Suite::Bochner1, "bochner1_pass.json", exit::PASS),
        (Suite::Curvature, "curvature_flat.json", exit::PASS),
        (Suite::SchwarzA, "schwarz_a_flat_target.json", exit::FAIL),
        (Suite::Curvature, "invalid_unknown_metric.json", exit::INVALID),
        (Suite::Curvature, "numerical_outside_domain.json", exit::NUMERICAL),
        (Suite::SchwarzA, "schwarz_a_square.json", exit::PASS),
        (Suite::All, "all_kahler_to_hopf.json", exit::PASS),
    ] {
        let (got, _) = report_value(suite, name);
        assert_eq!(got, code, "{name}");
    }
}

#[test]
fn square_map_bochner_residual_is_small() {
    let (code, v) = report_value(Suite::Bochner1, "bochner1_pass.json");
    assert_eq!(code, 0);
    let r = &v["results"][0];
    assert!(r["residual"].as_f64().unwrap() <= 1e-5);
    assert!((r["lambdas"][0].as_f64().unwrap() - 0.8).abs() < 1e-9);
}

#[test]
fn flat_curvature_report_is_zero() {
    let (_, v) = report_value(Suite::Curvature, "curvature_flat.json");
    for r in v["results"].as_array().unwrap().iter().filter(|r| r["kind"] == "point") {
        assert_eq!(r["max_abs_curvature"].as_f64().unwrap(), 0.0);
        assert_eq!(r["scalar"].as_f64().unwrap(), 0.0);
    }
    let probe = v["results"].as_array().unwrap().last().unwrap();
    assert_eq!(probe["holomorphic_sectional"]["max"].as_f64().unwrap(), 0.0);
}

#[test]
fn unmet_hypothesis_is_recorded() {
    let (_, v) = report_value(Suite::SchwarzA, "schwarz_a_flat_target.json");
    assert_eq!(v["error"]["kind"], "hypothesis_not_met");
    assert_eq!(v["pass"], false);
}

fn golden(name: &str, suite: Suite) {
    let out = run(suite, &read_fixture(name), None);
    let text = out.report.without_timing().to_json();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens").join(name);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(text, want, "{name} differs from its golden; rerun with UPDATE_GOLDENS=1 if intended");
}

#[test]
fn goldens_are_stable() {
    golden("curvature_flat.json", Suite::Curvature);
    golden("schwarz_a_flat_target.json", Suite::SchwarzA);
    golden("invalid_unknown_metric.json", Suite::Curvature);
}

#[test]
fn suite_mismatch_is_invalid() {
    let out = run(Suite::Bochner2, &read_fixture("bochner1_pass.json"), None);
    assert_eq!(out.exit_code, exit::INVALID);
}

#[test]
fn schema_rejects_unknown_keys_and_bad_values() {
    for text in [
        r#"{"scene": "poincare_square", "colour": 1}"#,
        r#"{"scene": "poincare_square", "ell": 0}"#,
        r#"{"scene": {"domain": {"id": "flat_m"}, "target": {"id": "flat_m"}}}"#,
        r#"{"scene": "poincare_square", "points": [[[0.1]]]}"#,
        r#"{"scene": "poincare_square", "fd": {"step": -1}}"#,
        "not json",
    ] {
        let out = run(Suite::Bochner1, text, None);
        assert_eq!(out.exit_code, exit::INVALID, "{text}");
        assert_eq!(out.report.error.unwrap().kind, "invalid_input");
    }
    let out = run(Suite::Bochner1, r#"{"scene": "no_such_scene"}"#, None);
    assert_eq!(out.exit_code, exit::INVALID);
}

#[test]
fn seed_override_is_echoed() {
    let out = run(Suite::Curvature, &read_fixture("curvature_flat.json"), Some(42));
    assert_eq!(out.report.config["seed"], 42);
}

#[test]
fn named_scene_uses_its_points_and_ells() {
    let out = run(Suite::Bochner2, r#"{"scene": "kahler_to_hopf"}"#, None);
    assert_eq!(out.exit_code, exit::PASS);
    // two points × ℓ ∈ {1, 2}
    assert_eq!(out.report.results.len(), 4);
    assert_eq!(out.report.scene["name"], "kahler_to_hopf");
}

#[test]
fn csv_has_coordinates_then_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let status = bin()
        .args(["bochner1", "--config"])
        .arg(fixture("bochner1_pass.json"))
        .arg("--out")
        .arg(dir.path().join("r.json"))
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..3], ["z1_re", "z1_im", "ell"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn stdout_report_and_threads_variable() {
    let out = bin()
        .env("CHERNLAB_THREADS", "2")
        .args(["curvature", "--config"])
        .arg(fixture("curvature_flat.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "curvature");

    let bad = bin()
        .env("CHERNLAB_THREADS", "zero")
        .args(["curvature", "--config"])
        .arg(fixture("curvature_flat.json"))
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(exit::INVALID));
}

#[test]
fn unwritable_output_and_missing_config() {
    let s = bin()
        .args(["curvature", "--config"])
        .arg(fixture("curvature_flat.json"))
        .args(["--out", "/nonexistent-dir/report.json"])
        .output()
        .unwrap();
    assert_eq!(s.status.code(), Some(exit::INVALID));
    let s = bin().args(["curvature", "--config", "/nonexistent.json"]).output().unwrap();
    assert_eq!(s.status.code(), Some(exit::INVALID));
}

#[test]
fn list_names_registry_entries() {
    let out = bin().arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let ids: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    for id in [
        "flat_m", "poincare_disk", "poincare_ball_m", "fubini_study_m", "hopf_m", "flat_torus", "identity", "linear",
        "power", "blaschke", "mobius", "weierstrass_p", "affine_torus",
    ] {
        assert!(ids.contains(&id), "{id}");
    }
    for e in registry::list() {
        let params = registry::example_params(e.id);
        match e.kind {
            EntryKind::Metric => registry::self_test_metric(e.id, &params).unwrap(),
            EntryKind::Map => registry::self_test_map(e.id, &params).unwrap(),
        }
    }
}
