use std::process::Command;

fn scrilab(args: &[&str], out: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_scrilab")).args(args).arg("--out").arg(out).output().unwrap()
}

#[test]
fn spectra_writes_the_eigenvalues() {
    let dir = tempfile::tempdir().unwrap();
    let out = scrilab(&["spectra"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("spectra.json")).unwrap()).unwrap();
    let eig: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(eig, [1.0, 0.5, 0.5, 0.25, 0.5, 0.25, 0.0]);
    assert_eq!(v["pass"], serde_json::Value::Bool(true));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gamma_u": 0.3}"#).unwrap();
    let out = scrilab(&["spectra", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(scrilab(&["spectra", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_scrilab"))
        .args(["spectra", "--out"])
        .arg(dir.path())
        .env("SCRILAB_GAMMAC", "nope")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
}

#[test]
fn transport_csv_has_a_header_and_full_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(scrilab(&["transport", "--deterministic"], dir.path()).status.code(), Some(0));
    let mut rd = csv::Reader::from_path(dir.path().join("transport.csv")).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["rho_I", "sup_00", "sup_01", "sup_0a", "sup_11", "sup_1a", "sup_tr", "sup_tf", "energy"]);
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        assert_eq!(rec.len(), header.len());
        assert!(rec.iter().all(|x| x.parse::<f64>().unwrap().is_finite()));
        rows += 1;
    }
    assert!(rows > 100);
    assert!(dir.path().join("transport_fit.json").exists());
}

#[test]
fn verify_subset_reports_each_requested_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = scrilab(&["verify", "--criteria", "1,9"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("criterion  1: PASS"));
    assert!(text.contains("criterion  9: PASS"));
    assert!(!text.contains("criterion  3"));
}

#[test]
fn deterministic_artifacts_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        for cmd in ["maxwell", "tensor-ledger"] {
            assert_eq!(scrilab(&[cmd, "--deterministic"], dir.path()).status.code(), Some(0));
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 4);
    for name in names {
        assert_eq!(std::fs::read(a.path().join(&name)).unwrap(), std::fs::read(b.path().join(&name)).unwrap(), "{name:?}");
    }
}
