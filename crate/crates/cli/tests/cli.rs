#![allow(clippy::neg_cmp_op_on_partial_ord)]
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ruinwerk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruinwerk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(table: &str, name: &str) -> Vec<f64> {
    let mut lines = table.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn survival_m1_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = ruinwerk(&["survival", "--config", fixture("m1.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(&out).unwrap();
    assert!(!table.contains('\r'));
    let x = column(&table, "x");
    let series = column(&table, "theta_pk");
    let k = x.iter().position(|&v| v == 2.0).unwrap();
    assert!((series[k] - (1.0 - 0.5 * (-1.0f64).exp())).abs() < 1e-4, "{}", series[k]);
    assert!((series[k] - 0.8161).abs() < 1e-4);
}

#[test]
fn survival_m2_methods_agree() {
    let o = ruinwerk(&["survival", "--config", fixture("m2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let diff = column(&stdout(&o), "abs_diff");
    assert!(diff.iter().cloned().fold(0.0, f64::max) <= 1e-3);
}

#[test]
fn survival_rejects_zero_x_max() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("m1.json")).unwrap().replace("\"x_max\": 10.0", "\"x_max\": 0.0");
    let cfg = write_config(dir.path(), &text);
    let out = dir.path().join("curve.csv");
    let o = ruinwerk(&["survival", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn transform_rows() {
    let o = ruinwerk(&["transform", "--config", fixture("m1.json").to_str().unwrap(), "--beta", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert_eq!(t.lines().next().unwrap(), "beta,psi,LH,LG,survival_transform,kappa");
    let expect = [("psi", 1.5), ("LH", 0.5), ("LG", 1.0), ("survival_transform", 2.0 / 3.0), ("kappa", 1.5)];
    for (name, e) in expect {
        assert!((column(&t, name)[0] - e).abs() < 1e-12, "{name}");
    }
    let o = ruinwerk(&["transform", "--config", fixture("m2.json").to_str().unwrap(), "--beta", "1"]);
    assert!((column(&stdout(&o), "LG")[0] - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn transform_rejects_non_positive_beta() {
    for beta in ["0", "1,-1"] {
        let o = ruinwerk(&["transform", "--config", fixture("m1.json").to_str().unwrap(), "--beta", beta]);
        assert_eq!(o.status.code(), Some(2), "beta {beta}");
    }
}

#[test]
fn net_profit_violation_exits_2_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("m1.json"))
        .unwrap()
        .replace("\"premium_rate\": 2.0", "\"premium_rate\": 1.0");
    let cfg = write_config(dir.path(), &text);
    let o = ruinwerk(&["transform", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("net profit"));
}

#[test]
fn missing_config_exits_2() {
    assert_eq!(ruinwerk(&["survival"]).status.code(), Some(2));
    assert_eq!(ruinwerk(&["survival", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(format!("{name}.csv"));
        let o = ruinwerk(&[
            "simulate",
            "--config",
            fixture("m1.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let summary = std::fs::read(out.with_extension("summary.json")).unwrap();
        (std::fs::read(&out).unwrap(), summary)
    };
    let a = run("a", "4");
    let b = run("b", "4");
    let c = run("c", "1");
    assert_eq!(a, b);
    assert_eq!(a, c);
    let summary: serde_json::Value = serde_json::from_slice(&a.1).unwrap();
    let mean_n = summary["mean_N"].as_f64().unwrap();
    assert!((mean_n - 1.0).abs() < 3.0 * (2.0f64 / 1e5).sqrt(), "{mean_n}");
    let ruin2 = summary["ruin"].as_array().unwrap().iter().find(|r| r["x"] == 2.0).unwrap();
    let p = ruin2["p_hat"].as_f64().unwrap();
    let allowance = 3.0 * ruin2["stderr"].as_f64().unwrap() + ruin2["horizon_bias_bound"].as_f64().unwrap();
    assert!((p - 0.5 * (-1.0f64).exp()).abs() <= allowance, "{p}");
    let header = String::from_utf8(a.0).unwrap();
    assert!(header.starts_with("path_id,i,sigma,L,J\n"));
}

#[test]
fn seed_flag_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let out = dir.path().join(format!("s{seed}.csv"));
        let o = ruinwerk(&["simulate", "--config", fixture("m2.json").to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn gamma_ladder_is_unsupported_but_ruin_mode_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gamma.csv");
    let cfg = fixture("gamma.json");
    let o = ruinwerk(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported configuration"));
    assert!(!out.exists());
    let o = ruinwerk(&["simulate", "--mode", "ruin", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let p = column(&std::fs::read_to_string(&out).unwrap(), "p_hat")[0];
    assert!(p > 0.0 && p < 1.0);
}

#[test]
fn validate_m1_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = ruinwerk(&["validate", "--config", fixture("m1.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", std::fs::read_to_string(&out).unwrap_or_default());
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn validate_m2_passes_and_injected_dependence_fails() {
    let cfg = fixture("m2.json");
    let o = ruinwerk(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = ruinwerk(&["validate", "--config", cfg.to_str().unwrap(), "--inject-dependence"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let failing: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failing, vec!["independence_L0_J1".to_string()]);
}
