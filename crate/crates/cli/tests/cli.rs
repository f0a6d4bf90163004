use std::path::Path;
use std::process::{Command, Output};

fn hypermass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermass"))
        .args(args)
        .env_remove("HYPERMASS_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid JSON")
}

#[test]
fn ads_mass_reproduces_parameter() {
    let out = hypermass(&["mass", "--n", "3", "--m", "1.0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["report"]["m_boundary"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(v["report"]["residual_identity"].as_f64().unwrap() < 1e-6);
}

#[test]
fn every_mass_method_agrees() {
    for method in ["boundary-limit", "four-term", "level-set"] {
        let out = hypermass(&["mass", "--n", "4", "--m", "0.3", "--method", method]);
        assert_eq!(code(&out), 0, "{method}");
        assert!((json(&out)["m_method"].as_f64().unwrap() - 0.3).abs() < 1e-8, "{method}");
    }
}

#[test]
fn constant_profile_has_zero_mass() {
    let out = hypermass(&["mass", "--family", "constant", "--c", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["m_levelset_total"].as_f64(), Some(0.0));
}

#[test]
fn invalid_parameters_exit_two() {
    assert_eq!(code(&hypermass(&["mass", "--n", "2"])), 2);
    assert_eq!(code(&hypermass(&["mass", "--m", "-1"])), 2);
    assert_eq!(code(&hypermass(&["mass", "--method", "nope"])), 2);
    assert_eq!(code(&hypermass(&["height", "--beta", "1"])), 2);
    assert_eq!(code(&hypermass(&["sweep", "--masses", "0.1,0.5"])), 2);
    assert_eq!(code(&hypermass(&["frobnicate"])), 2);
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "n = 3\ncolour = \"blue\"\n").unwrap();
    assert_eq!(code(&hypermass(&["mass", "--config", path.to_str().unwrap()])), 2);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "n = 4\nm = 2.0\n").unwrap();
    let out = hypermass(&["mass", "--config", path.to_str().unwrap(), "--m", "0.5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["profile"]["n"].as_u64(), Some(4));
    assert!((v["m_method"].as_f64().unwrap() - 0.5).abs() < 1e-8);
}

#[test]
fn profile_document_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.json");
    std::fs::write(&path, r#"{"kind": "ads", "n": 5, "m": 0.7}"#).unwrap();
    let out = hypermass(&["mass", "--profile", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["m_method"].as_f64().unwrap() - 0.7).abs() < 1e-8);
    std::fs::write(&path, r#"{"kind": "ads", "n": 5, "m": 0.7, "extra": 1}"#).unwrap();
    assert_eq!(code(&hypermass(&["mass", "--profile", path.to_str().unwrap()])), 2);
}

#[test]
fn output_file_is_written_whole_and_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&hypermass(&["height", "--n", "4", "--m", "0.1", "--output", p])), 0);
    let first = std::fs::read_to_string(&path).unwrap();
    assert_eq!(code(&hypermass(&["height", "--n", "4", "--m", "0.1", "--output", p])), 0);
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    assert!(serde_json::from_str::<serde_json::Value>(&first).is_ok());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let missing = Path::new("/nonexistent-dir/out.json");
    assert_eq!(code(&hypermass(&["ode", "--output", missing.to_str().unwrap()])), 1);
}

#[test]
fn height_bound_holds_for_moderate_mass_and_fails_for_small() {
    let out = hypermass(&["height", "--n", "3", "--m", "0.5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["verdict"].as_bool(), Some(true));
    let out = hypermass(&["height", "--n", "3", "--m", "0.01"]);
    assert_eq!(code(&out), 1);
    assert!(!out.stderr.is_empty());
}

#[test]
fn ode_blowup_matches_closed_form() {
    let out = hypermass(&["ode", "--n", "3", "--beta", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let closed = 3.0 * 3f64.sqrt() / 2.0;
    assert!((v["blowup_numeric"].as_f64().unwrap() - closed).abs() < 1e-4);
}

#[test]
fn penrose_ratio_at_least_one() {
    let out = hypermass(&["penrose", "--n", "4", "--m", "2"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["report"]["ratio"].as_f64().unwrap() >= 1.0);
    assert_eq!(code(&hypermass(&["penrose", "--family", "exponential"])), 2);
}

#[test]
fn minkowski_sphere_and_corpus() {
    let out = hypermass(&["minkowski", "--radius", "1.5", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let row = v["rows"][0]["margin"].as_f64().unwrap();
    let closed = v["closed_form"]["margin"].as_f64().unwrap();
    assert!((row - closed).abs() < 1e-6 * closed.abs());
    assert_eq!(code(&hypermass(&["minkowski", "--count", "5"])), 0);
    assert_eq!(code(&hypermass(&["minkowski", "--radius", "8.8", "--kappa", "0.1"])), 1);
}

#[test]
fn scalar_method_matches_oracle_in_csv() {
    let out = hypermass(&["scalar", "--method", "divergence", "--points", "10", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,R_kappa,curly_R,oracle,difference"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn sweep_csv_header_and_single_row() {
    let out = hypermass(&["sweep", "--masses", "0.1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("m,M_A,M_Bplus,M_Bminus,flat_upper,ratio\n"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn sweep_reports_non_monotone_upper_bound() {
    let out = hypermass(&["sweep", "--masses", "0.5,0.1"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["strictly_decreasing"].as_bool(), Some(false));
}

#[test]
fn verify_passing_suites_exit_zero() {
    let out = hypermass(&["verify", "--suites", "oracle,mass,scaling"]);
    assert_eq!(code(&out), 0);
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("one JSON object per line");
        assert_eq!(v["passed"].as_bool(), Some(true));
    }
}

#[test]
fn verify_detects_injected_fault() {
    let out = hypermass(&["verify", "--suites", "oracle", "--inject-fault"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("counterexample"));
}

#[test]
fn verify_empty_or_unknown_selection_exits_two() {
    assert_eq!(code(&hypermass(&["verify", "--suites", ""])), 2);
    assert_eq!(code(&hypermass(&["verify", "--suites", "nope"])), 2);
}

#[test]
fn verify_output_is_deterministic() {
    let a = hypermass(&["verify", "--suites", "inequalities,ode"]);
    let b = Command::new(env!("CARGO_BIN_EXE_hypermass"))
        .args(["verify", "--suites", "inequalities,ode"])
        .env("HYPERMASS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(code(&a), code(&b));
}

#[test]
fn invalid_thread_count_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_hypermass"))
        .arg("ode")
        .env("HYPERMASS_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
