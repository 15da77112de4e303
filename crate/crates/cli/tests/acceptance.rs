//! Runs `scrilab verify --deterministic` twice and rechecks every criterion against tolerances
//! pinned here, independently of the thresholds the binary reports.

use serde_json::Value;
use std::path::Path;
use std::process::Command;

#[derive(Clone, Copy)]
enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

/// Pinned bounds keyed by check-name prefix. A criterion's checks without an entry here must
/// still report `pass`.
const PINNED: &[(u8, &str, Bound, usize)] = &[
    (1, "A(h=0) equals the closed form", Bound::AtMost(0.0), 1),
    (1, "block spectra", Bound::AtMost(1e-12), 1),
    (1, "duality residual over 100 random pairs", Bound::AtMost(1e-12), 1),
    (2, "A entries from the Frechet derivative", Bound::AtMost(1e-6), 2),
    (2, "B entries", Bound::AtMost(0.05), 2),
    (3, "scalar exponent, constraint", Bound::AtMost(0.05), 3),
    (3, "scalar exponent, gauge change", Bound::AtMost(0.05), 3),
    (4, "block 00 exponent at", Bound::AtMost(0.05), 4),
    (4, "block 01 exponent at", Bound::AtMost(0.05), 1),
    (4, "block 0a exponent at", Bound::AtMost(0.05), 4),
    (4, "block 11 exponent at", Bound::AtMost(0.05), 1),
    (4, "block 1a exponent at", Bound::AtMost(0.05), 1),
    (4, "block tr exponent at", Bound::AtMost(0.05), 4),
    (4, "block tf exponent at", Bound::AtMost(0.01), 1),
    (4, "block 00 exponent increases", Bound::AtLeast(f64::MIN_POSITIVE), 1),
    (4, "block 0a exponent increases", Bound::AtLeast(f64::MIN_POSITIVE), 1),
    (4, "block tr exponent increases", Bound::AtLeast(f64::MIN_POSITIVE), 1),
    (5, "Schwarzschild Ricci", Bound::AtMost(1e-9), 1),
    (5, "Christoffel remainder slopes", Bound::AtLeast(-0.1), 1),
    (5, "curvature leading terms", Bound::AtMost(0.1), 1),
    (6, "(dx1)^2 source", Bound::AtMost(0.01), 3),
    (7, "1-form block", Bound::AtMost(0.05), 3),
    (7, "gauge residual persistence", Bound::AtMost(1e-6), 1),
    (8, "mass loss identity after Richardson", Bound::AtMost(0.01), 1),
    (8, "Bondi mass nonincreasing", Bound::AtMost(1e-9), 2),
    (8, "h11 remainder exponent drop", Bound::AtLeast(0.15), 1),
    (9, "commutator expansion", Bound::AtMost(1e-12), 4),
    (9, "interpolation constant on pure modes", Bound::AtMost(1.0 + 1e-9), 1),
    (10, "energy ratio spread", Bound::AtMost(2.0), 1),
    (10, "Q coefficients manifestly positive", Bound::AtLeast(1.0), 1),
    (11, "serial and parallel transport bitwise equal", Bound::AtLeast(1.0), 1),
    (11, "seeded sampling reproducible", Bound::AtLeast(1.0), 1),
];

const TIME_LIMITS: &[(u8, f64)] = &[(1, 1.0), (2, 10.0), (3, 300.0)];

fn verify(dir: &Path) -> (Vec<u8>, Value, Value) {
    let status = Command::new(env!("CARGO_BIN_EXE_scrilab"))
        .args(["verify", "--deterministic", "--out"])
        .arg(dir)
        .output()
        .expect("launch scrilab")
        .status;
    assert!(status.code().is_some(), "scrilab terminated by a signal");
    let bytes = std::fs::read(dir.join("verify.json")).expect("verify.json");
    let report = serde_json::from_slice(&bytes).expect("parse verify.json");
    let timings = serde_json::from_slice(&std::fs::read(dir.join("verify_timings.json")).unwrap()).unwrap();
    (bytes, report, timings)
}

fn holds(bound: Bound, value: f64) -> bool {
    match bound {
        Bound::AtMost(t) => value <= t,
        Bound::AtLeast(t) => value >= t,
    }
}

fn main() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (bytes1, report, timings) = verify(d1.path());
    let (bytes2, _, _) = verify(d2.path());
    let checks = report["checks"].as_array().expect("checks array");

    let mut failed = Vec::new();
    for c in 1..=11u8 {
        let mine: Vec<&Value> = checks.iter().filter(|k| k["criterion"].as_u64() == Some(c as u64)).collect();
        let mut problems = Vec::new();
        if mine.is_empty() {
            problems.push("no checks reported".to_string());
        }
        for &(crit, prefix, bound, count) in PINNED.iter().filter(|p| p.0 == c) {
            let hits: Vec<&&Value> = mine.iter().filter(|k| k["name"].as_str().unwrap().starts_with(prefix)).collect();
            if hits.len() != count {
                problems.push(format!("{prefix}: {} checks, expected {count}", hits.len()));
            }
            for k in hits {
                let v = k["value"].as_f64().unwrap_or(f64::NAN);
                if !holds(bound, v) {
                    problems.push(format!("{} = {v:e} (criterion {crit})", k["name"].as_str().unwrap()));
                }
            }
        }
        for k in &mine {
            if k["pass"] != Value::Bool(true) {
                problems.push(format!("{} reported failing", k["name"].as_str().unwrap()));
            }
        }
        if let Some(&(_, limit)) = TIME_LIMITS.iter().find(|t| t.0 == c) {
            let secs = timings
                .as_array()
                .unwrap()
                .iter()
                .find(|t| t["criterion"].as_u64() == Some(c as u64))
                .and_then(|t| t["seconds"].as_f64())
                .unwrap_or(f64::INFINITY);
            if secs >= limit {
                problems.push(format!("runtime {secs:.2} s over {limit} s"));
            }
        }
        if c == 11 && bytes1 != bytes2 {
            problems.push("verify.json differs between runs".into());
        }
        if problems.is_empty() {
            println!("criterion {c:2}: PASS ({} checks)", mine.len());
        } else {
            println!("criterion {c:2}: FAIL: {}", problems.join("; "));
            failed.push(c);
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
