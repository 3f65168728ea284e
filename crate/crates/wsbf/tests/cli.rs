//! Drives the `wsbf` binary end to end on a synthetic monthly series.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const COMMANDS: [&str; 5] = ["stats", "diagnose", "select-features", "evaluate", "explain"];

fn synthetic_csv() -> String {
    let mut s = String::from("date,consumption_kwh,avg_temperature,rain\n");
    for i in 0..79u32 {
        let (year, month) = (2018 + i / 12, i % 12 + 1);
        let phase = f64::from(month) / 12.0 * std::f64::consts::TAU;
        let kwh = 15_000.0 + 3_000.0 * phase.sin() + 20.0 * f64::from(i) + f64::from((i * 7919) % 400);
        let temp = 24.0 + 3.0 * phase.sin() + f64::from(i % 3) * 0.1;
        let rain = if i == 5 { String::new() } else { format!("{:.1}", 100.0 + 80.0 * phase.cos()) };
        s.push_str(&format!("{year}-{month:02},{kwh:.0},{temp:.2},{rain}\n"));
    }
    s
}

fn setup(dir: &Path, extra: serde_json::Value) -> PathBuf {
    fs::write(dir.join("series.csv"), synthetic_csv()).unwrap();
    let mut cfg = serde_json::json!({
        "input": "series.csv",
        "dataset": "syn",
        "seed": 11,
        "hyperparameters": {
            "lstm": {"units": 6, "epochs": 8, "batch_size": 16},
            "rf": {"n_estimators": 15},
            "gbt": {"n_estimators": 15},
            "esn": {"reservoirs": 40}
        },
        "tuning": {"population": 4, "iterations": 2, "seeds": [1, 2]},
        "wsb": {"samples": 20},
        "shap": {"elimination_cap": 4, "background_cap": 15, "permutations": 3}
    });
    for (k, v) in extra.as_object().unwrap() {
        cfg[k] = v.clone();
    }
    let path = dir.join("config.json");
    fs::write(&path, cfg.to_string()).unwrap();
    path
}

fn wsbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsbf")).args(args).output().unwrap()
}

fn run_all(config: &Path, out: &Path) {
    let (c, o) = (config.to_str().unwrap(), out.to_str().unwrap());
    let tune = wsbf(&["tune", "--config", c, "--out", o, "--model", "gbt"]);
    assert!(tune.status.success(), "{}", String::from_utf8_lossy(&tune.stderr));
    for cmd in COMMANDS {
        let r = wsbf(&[cmd, "--config", c, "--out", o]);
        assert!(r.status.success(), "{cmd}: {}", String::from_utf8_lossy(&r.stderr));
        assert_eq!(String::from_utf8_lossy(&r.stdout).lines().count(), 1, "{cmd}");
    }
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn full_run_is_reproducible_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path(), serde_json::json!({}));
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_all(&cfg, &a);
    run_all(&cfg, &b);
    let (ta, tb) = (tree(&a), tree(&b));
    assert_eq!(ta.len(), tb.len());
    for ((pa, ca), (pb, cb)) in ta.iter().zip(&tb) {
        assert_eq!(pa, pb);
        assert!(ca == cb, "{} differs between runs", pa.display());
    }
    let root = a.join("syn");
    for f in [
        "stats/stats.csv",
        "diagnose/acf.csv",
        "diagnose/pacf.csv",
        "diagnose/tests.csv",
        "select-features/elimination.csv",
        "select-features/selected_features.json",
        "tune/best_gbt.json",
        "tune/gbt/trace.csv",
        "evaluate/metrics.csv",
        "evaluate/forecast.csv",
        "evaluate/forecast_vs_actual.csv",
        "evaluate/wsb.csv",
        "explain/shap.csv",
        "explain/force_plot.csv",
    ] {
        assert!(root.join(f).is_file(), "missing {f}");
    }
    // Four optimizer runs of 4 x 2 evaluations, one trace row per iteration.
    assert_eq!(csv_rows(&root.join("tune/gbt/trace.csv")).len(), 8);
    let metrics = csv_rows(&root.join("evaluate/metrics.csv"));
    let names: Vec<&str> = metrics.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["wsb", "lstm", "rf", "svr", "gbt", "ses", "des", "hw_additive", "hw_multiplicative", "esn"]);
    let gbt = metrics.iter().find(|r| r[0] == "gbt").unwrap();
    assert_eq!(gbt[4], "true", "tuned GBT should be picked up");
}

#[test]
fn zero_weight_reproduces_the_strong_forecast() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path(), serde_json::json!({"wsb": {"w": 0.0, "tune": false}}));
    let out = dir.path().join("out");
    let r = wsbf(&["evaluate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let rows = csv_rows(&out.join("syn/evaluate/forecast.csv"));
    assert_eq!(rows.len(), 12);
    for row in &rows {
        assert_eq!(row[3], row[4], "wsb column must equal lstm");
    }
    let wsb = csv_rows(&out.join("syn/evaluate/wsb.csv"));
    assert!(wsb.iter().all(|r| r[4].parse::<f64>().unwrap() == 0.0 && r[5].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn seed_override_changes_stochastic_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = setup(dir.path(), serde_json::json!({"wsb": {"tune": false}}));
    let c = cfg.to_str().unwrap();
    let read = |seed: &str| {
        let out = dir.path().join(seed);
        let r = wsbf(&["evaluate", "--config", c, "--out", out.to_str().unwrap(), "--seed", seed]);
        assert!(r.status.success());
        fs::read_to_string(out.join("syn/evaluate/forecast.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn errors_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let r = wsbf(&["stats", "--config", missing.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("cannot read config"));

    let cfg = setup(dir.path(), serde_json::json!({"horizon": 0}));
    let r = wsbf(&["stats", "--config", cfg.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("horizon"));

    let cfg = setup(dir.path(), serde_json::json!({}));
    let r = wsbf(&["tune", "--config", cfg.to_str().unwrap(), "--model", "ses"]);
    assert!(!r.status.success());
    let r = wsbf(&["tune", "--config", cfg.to_str().unwrap(), "--model", "arima"]);
    assert!(!r.status.success());

    fs::write(dir.path().join("series.csv"), "date,consumption_kwh\n2020-01,1\n2020-01,2\n").unwrap();
    let r = wsbf(&["stats", "--config", cfg.to_str().unwrap()]);
    assert!(!r.status.success());
    assert!(!String::from_utf8_lossy(&r.stderr).is_empty());
}
