//! Golden-file comparison with numeric tolerances.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use serde_json::Value;

/// Relative tolerance for reported numbers, which carry 6 significant digits.
pub const REL_TOL: f64 = 1e-5;
pub const ABS_TOL: f64 = 1e-9;
/// Gradient norms at an optimum are roundoff; they only need to be small.
pub const GRAD_NORM_MAX: f64 = 1e-4;

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

fn compare(path: &str, want: &Value, got: &Value, diffs: &mut Vec<String>) {
    let key = path.rsplit('.').next().unwrap_or("");
    match (want, got) {
        (Value::Number(w), Value::Number(g)) => {
            let (w, g) = (w.as_f64().unwrap(), g.as_f64().unwrap());
            let ok = match key {
                "grad_norm" => g.abs() < GRAD_NORM_MAX,
                "iterations" => true,
                _ => (w - g).abs() <= ABS_TOL + REL_TOL * w.abs().max(g.abs()),
            };
            if !ok {
                diffs.push(format!("{path}: expected {w}, got {g}"));
            }
        }
        (Value::Object(w), Value::Object(g)) => {
            let wk: Vec<&String> = w.keys().collect();
            let gk: Vec<&String> = g.keys().collect();
            if wk != gk {
                diffs.push(format!("{path}: keys {wk:?} vs {gk:?}"));
                return;
            }
            for (k, wv) in w {
                compare(&format!("{path}.{k}"), wv, &g[k], diffs);
            }
        }
        (Value::Array(w), Value::Array(g)) => {
            if w.len() != g.len() {
                diffs.push(format!("{path}: length {} vs {}", w.len(), g.len()));
                return;
            }
            for (i, (wv, gv)) in w.iter().zip(g).enumerate() {
                compare(&format!("{path}[{i}]"), wv, gv, diffs);
            }
        }
        _ if want == got => {}
        _ => diffs.push(format!("{path}: expected {want}, got {got}")),
    }
}

/// Differences between a golden value and a fresh one, empty when they
/// agree within tolerance.
pub fn diff(want: &Value, got: &Value) -> Vec<String> {
    let mut out = Vec::new();
    compare("$", want, got, &mut out);
    out
}

/// Checks `got` against the named golden file, or rewrites the file when
/// `SYMSTAT_BLESS` is set.
pub fn check_golden(name: &str, got: &str) {
    let path = golden_path(name);
    if std::env::var_os("SYMSTAT_BLESS").is_some() {
        std::fs::write(&path, got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}; run with SYMSTAT_BLESS=1 to create it", path.display()));
    let want: Value = serde_json::from_str(&want).unwrap();
    let got: Value = serde_json::from_str(got).unwrap();
    let d = diff(&want, &got);
    assert!(d.is_empty(), "{name} differs from its golden file:\n{}", d.join("\n"));
}
