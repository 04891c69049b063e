//! End-to-end tests of the `pirbn` binary: artifact layout, determinism,
//! exit codes, and the report/check subcommands.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn pirbn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pirbn"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawning pirbn");
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    out
}

fn exit_code(cmd: &mut Command) -> i32 {
    cmd.output().expect("spawning pirbn").status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

/// A sub-second Poisson run small enough for every test.
fn tiny_config() -> Value {
    json!({
        "problem": { "name": "poisson1d", "mu": 1.0, "shift": 0.0 },
        "resolution": { "interior": [21] },
        "model": {
            "type": "pirbn",
            "kind": "gaussian",
            "centers": [[-0.1, 1.1]],
            "counts": [21],
            "b0": 2.0
        },
        "train": { "iterations": 60, "snapshot_iters": [0, 60] }
    })
}

fn parse_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn oracle_check_reports_every_problem_passing() {
    let out = run_ok(pirbn().arg("oracle-check"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for name in [
        "poisson1d",
        "mixed_freq1d",
        "spring1d",
        "wave2d",
        "diffusion2d",
        "ucm_poiseuille",
    ] {
        assert!(stdout.contains(name), "missing {name} in:\n{stdout}");
    }
    assert!(!stdout.contains("FAIL"), "unexpected failure in:\n{stdout}");
}

#[test]
fn oracle_check_rejects_unknown_problem_name() {
    assert_eq!(exit_code(pirbn().args(["oracle-check", "heat3d"])), 2);
}

#[test]
fn run_exports_the_full_artifact_set() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "tiny.json", &tiny_config());
    let out_dir = tmp.path().join("artifacts");
    run_ok(pirbn().arg("run").arg(&config).arg("--out").arg(&out_dir));

    for file in [
        "loss_history.csv",
        "metrics.json",
        "fields.csv",
        "ntk_0.csv",
        "ntk_0_meta.json",
        "ntk_60.csv",
        "ntk_60_meta.json",
        "checkpoint_0.json",
        "checkpoint_60.json",
        "manifest.json",
    ] {
        assert!(out_dir.join(file).exists(), "missing artifact {file}");
    }

    let (header, rows) = parse_csv(&out_dir.join("loss_history.csv"));
    assert_eq!(header, ["iteration", "loss", "loss_g", "loss_b", "w_g", "w_b"]);
    assert_eq!(rows.len(), 61, "one row per iteration plus the initial state");

    let metrics = read_json(&out_dir.join("metrics.json"));
    assert_eq!(metrics["status"], "ok");
    assert_eq!(metrics["mae"].as_array().unwrap().len(), 1);
    assert!(metrics["loss_g"].as_f64().unwrap().is_finite());

    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn fields_error_column_recomputes_from_pred_and_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "tiny.json", &tiny_config());
    let out_dir = tmp.path().join("artifacts");
    run_ok(pirbn().arg("run").arg(&config).arg("--out").arg(&out_dir));

    let (header, rows) = parse_csv(&out_dir.join("fields.csv"));
    assert_eq!(header, ["x_0", "pred_0", "exact_0", "abs_error_0"]);
    assert!(!rows.is_empty());
    for row in rows {
        let pred: f64 = row[1].parse().unwrap();
        let exact: f64 = row[2].parse().unwrap();
        let err: f64 = row[3].parse().unwrap();
        assert!(
            ((pred - exact).abs() - err).abs() <= 1e-15,
            "error column drifted from |pred - exact|"
        );
    }
}

#[test]
fn identical_configs_byte_reproduce_all_artifacts_but_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "tiny.json", &tiny_config());
    let (dir_a, dir_b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(pirbn().arg("run").arg(&config).arg("--out").arg(&dir_a));
    run_ok(pirbn().arg("run").arg(&config).arg("--out").arg(&dir_b));

    for entry in fs::read_dir(&dir_a).unwrap() {
        let name = entry.unwrap().file_name();
        let (a, b) = (dir_a.join(&name), dir_b.join(&name));
        if name == "manifest.json" {
            let (ma, mb) = (read_json(&a), read_json(&b));
            assert_eq!(ma["config_hash"], mb["config_hash"]);
            assert_eq!(ma["version"], mb["version"]);
            continue;
        }
        assert_eq!(
            fs::read(&a).unwrap(),
            fs::read(&b).unwrap(),
            "artifact {name:?} is not byte-reproducible"
        );
    }
}

#[test]
fn diverged_training_is_recorded_and_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = tiny_config();
    cfg["model"]["kind"] = json!("thin_plate_spline");
    cfg["train"] = json!({ "iterations": 50, "optimizer": "gd", "learning_rate": 1e15 });
    let config = write_config(tmp.path(), "explode.json", &cfg);
    let out_dir = tmp.path().join("artifacts");

    let code = exit_code(pirbn().arg("run").arg(&config).arg("--out").arg(&out_dir));
    assert_eq!(code, 3);

    let metrics = read_json(&out_dir.join("metrics.json"));
    assert_eq!(metrics["status"], "diverged");
    assert!(metrics["diverged_at"].as_u64().is_some());
    assert!(
        !out_dir.join("loss_history.csv").exists(),
        "diverged runs record only the outcome"
    );
}

#[test]
fn config_parse_errors_name_the_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("broken.json");
    fs::write(&path, "{ \"problem\": { \"name\": \"poisson1d\" }\n  oops").unwrap();
    let out = pirbn().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("broken.json"), "stderr: {stderr}");
    assert!(stderr.contains("line"), "stderr: {stderr}");
}

#[test]
fn gate_flag_maps_thresholds_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();

    let mut strict = tiny_config();
    strict["gate"] = json!({ "max_abs_error": 1e-30 });
    let config = write_config(tmp.path(), "strict.json", &strict);
    let out_dir = tmp.path().join("strict");
    let code = exit_code(
        pirbn().arg("run").arg(&config).arg("--gate").arg("--out").arg(&out_dir),
    );
    assert_eq!(code, 4);

    let mut loose = tiny_config();
    loose["gate"] = json!({ "max_abs_error": 1e9, "mae": 1e9 });
    let config = write_config(tmp.path(), "loose.json", &loose);
    let out_dir = tmp.path().join("loose");
    run_ok(pirbn().arg("run").arg(&config).arg("--gate").arg("--out").arg(&out_dir));

    let no_gate = write_config(tmp.path(), "none.json", &tiny_config());
    let out_dir = tmp.path().join("none");
    let code = exit_code(
        pirbn().arg("run").arg(&no_gate).arg("--gate").arg("--out").arg(&out_dir),
    );
    assert_eq!(code, 2, "--gate without a gate section is a config error");
}

#[test]
fn sweep_writes_member_dirs_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = tiny_config();
    cfg["sweep"] = json!({ "axis": "b0", "values": [2, 4] });
    let config = write_config(tmp.path(), "sweep.json", &cfg);
    let out_dir = tmp.path().join("sweep");
    run_ok(pirbn().arg("sweep").arg(&config).arg("--out").arg(&out_dir));

    for member in ["b0_2", "b0_4"] {
        let metrics = read_json(&out_dir.join(member).join("metrics.json"));
        assert_eq!(metrics["status"], "ok", "member {member}");
    }
    let (header, rows) = parse_csv(&out_dir.join("summary.csv"));
    assert_eq!(rows.len(), 2);
    let col: HashMap<&str, usize> =
        header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();
    for row in &rows {
        assert_eq!(row[col["status"]], "ok");
        assert!(row[col["mae_0"]].parse::<f64>().unwrap().is_finite());
        assert!(matches!(row[col["mae_flat"]].as_str(), "true" | "false"));
    }
}

#[test]
fn run_and_sweep_reject_each_others_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut swept = tiny_config();
    swept["sweep"] = json!({ "axis": "b0", "values": [2] });
    let sweep_cfg = write_config(tmp.path(), "sweep.json", &swept);
    let plain_cfg = write_config(tmp.path(), "plain.json", &tiny_config());

    assert_eq!(exit_code(pirbn().arg("run").arg(&sweep_cfg)), 2);
    assert_eq!(exit_code(pirbn().arg("sweep").arg(&plain_cfg)), 2);
}

#[test]
fn ntk_report_rederives_snapshot_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "tiny.json", &tiny_config());
    let out_dir = tmp.path().join("artifacts");
    run_ok(pirbn().arg("run").arg(&config).arg("--out").arg(&out_dir));
    run_ok(pirbn().arg("ntk-report").arg(&out_dir));

    let report = read_json(&out_dir.join("report.json"));
    let snapshots = report["snapshots"].as_array().unwrap();
    assert_eq!(snapshots.len(), 2);
    assert!(out_dir.join("normalized_0.csv").exists());
    assert!(out_dir.join("normalized_60.csv").exists());

    let meta = read_json(&out_dir.join("ntk_0_meta.json"));
    let rederived = &snapshots[0];
    for key in ["diag_dominance", "drift_from_first"] {
        let a = meta[key].as_f64().unwrap();
        let b = rederived[key].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-12, "{key}: {a} vs {b}");
    }

    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(exit_code(pirbn().arg("ntk-report").arg(&empty)), 2);
}

#[test]
fn multi_seed_run_aggregates_summary_and_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = tiny_config();
    cfg["seeds"] = json!([0, 1]);
    let config = write_config(tmp.path(), "pair.json", &cfg);
    let out_dir = tmp.path().join("pair");
    run_ok(pirbn().arg("run").arg(&config).arg("--jobs").arg("2").arg("--out").arg(&out_dir));

    assert!(out_dir.join("seed_0/metrics.json").exists());
    assert!(out_dir.join("seed_1/metrics.json").exists());
    let (_, rows) = parse_csv(&out_dir.join("summary.csv"));
    assert_eq!(rows.len(), 2);

    let stats = read_json(&out_dir.join("stats.json"));
    assert_eq!(stats["runs"], 2);
    assert_eq!(stats["completed"], 2);
    assert!(stats["mae_mean"][0].as_f64().unwrap().is_finite());
    assert!(stats["mae_std"][0].as_f64().unwrap() >= 0.0);
}

#[test]
fn output_root_falls_back_to_env_var() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "tiny_env.json", &tiny_config());
    let root = tmp.path().join("env_root");
    run_ok(pirbn().arg("run").arg(&config).env("PIRBN_OUT", &root));
    assert!(root.join("tiny_env/metrics.json").exists());
}
