use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn lcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcf"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = lcf(args);
    assert!(
        out.status.success(),
        "lcf {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn err(args: &[&str]) -> String {
    let out = lcf(args);
    assert!(!out.status.success(), "lcf {args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, id: &str, n: &str) {
    ok(&["gen", id, "--n", n, "--seed", "3", "--out", p(dir)]);
}

#[test]
fn gen_writes_full_table_and_split() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "mock1", "2000");
    let full = fs::read_to_string(dir.path().join("mock1.csv")).unwrap();
    let mut lines = full.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,x3,x4,label");
    assert_eq!(lines.count(), 2000);
    let rows = |f: &str| {
        fs::read_to_string(dir.path().join(f))
            .unwrap()
            .lines()
            .count()
            - 1
    };
    assert_eq!(rows("mock1_train.csv") + rows("mock1_test.csv"), 2000);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("mock1_manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["n_events"], 2000);
}

#[test]
fn pipeline_is_deterministic_and_replayable() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    gen(d, "mock1", "4000");
    let train = d.join("mock1_train.csv");
    let test = d.join("mock1_test.csv");
    for run in ["a", "b"] {
        let fit = d.join(run).join("train");
        let score = d.join(run).join("eval");
        ok(&[
            "train",
            "--data",
            p(&train),
            "--epochs",
            "3",
            "--strategy",
            "sequential",
            "--seed",
            "5",
            "--out",
            p(&fit),
        ]);
        let model = fit.join("model.json");
        ok(&[
            "report",
            "--model",
            p(&model),
            "--data",
            p(&test),
            "--out",
            p(&score),
        ]);
        ok(&[
            "eval",
            "--model",
            p(&model),
            "--data",
            p(&test),
            "--out",
            p(&score),
        ]);
    }
    for file in [
        "train/model.json",
        "train/history.csv",
        "eval/report.json",
        "eval/metrics.json",
        "eval/plots/x1.csv",
    ] {
        assert_eq!(
            fs::read(d.join("a").join(file)).unwrap(),
            fs::read(d.join("b").join(file)).unwrap(),
            "{file} differs between identical runs"
        );
    }
    let again = d.join("again");
    ok(&[
        "train",
        "--config",
        p(&d.join("a/train/config.json")),
        "--out",
        p(&again),
    ]);
    assert_eq!(
        fs::read(d.join("a/train/model.json")).unwrap(),
        fs::read(again.join("model.json")).unwrap()
    );
}

#[test]
fn zero_epochs_is_rejected() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "mock1", "200");
    let msg = err(&[
        "train",
        "--data",
        p(&dir.path().join("mock1_train.csv")),
        "--epochs",
        "0",
        "--out",
        p(dir.path()),
    ]);
    assert!(msg.contains("epochs"), "{msg}");
}

#[test]
fn unknown_dataset_is_rejected() {
    let dir = TempDir::new().unwrap();
    let msg = err(&["gen", "mock9", "--out", p(dir.path())]);
    assert!(msg.contains("mock9"), "{msg}");
}

#[test]
fn unknown_strategy_lists_known_ones() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "mock1", "200");
    let msg = err(&[
        "train",
        "--data",
        p(&dir.path().join("mock1_train.csv")),
        "--strategy",
        "greedy",
        "--out",
        p(dir.path()),
    ]);
    assert!(
        msg.contains("parallel") && msg.contains("sequential"),
        "{msg}"
    );
}

#[test]
fn corrupted_model_file_is_rejected() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "mock1", "200");
    let model = dir.path().join("model.json");
    fs::write(&model, "{\"features\": [").unwrap();
    err(&[
        "eval",
        "--model",
        p(&model),
        "--data",
        p(&dir.path().join("mock1_test.csv")),
        "--out",
        p(dir.path()),
    ]);
}

#[test]
fn mismatched_columns_are_rejected() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    gen(d, "mock1", "400");
    gen(d, "mock2", "400");
    ok(&[
        "train",
        "--data",
        p(&d.join("mock1_train.csv")),
        "--epochs",
        "1",
        "--out",
        p(d),
    ]);
    let msg = err(&[
        "eval",
        "--model",
        p(&d.join("model.json")),
        "--data",
        p(&d.join("mock2_test.csv")),
        "--out",
        p(d),
    ]);
    assert!(
        msg.contains("x2") || msg.contains("column") || msg.contains("feature"),
        "{msg}"
    );
}

#[test]
fn missing_centers_are_listed() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("custom.csv");
    fs::write(
        &csv,
        "x1,foo,bar,label\n0,1,2,1\n1,2,3,0\n2,3,1,1\n3,1,0,0\n",
    )
    .unwrap();
    let msg = err(&[
        "train",
        "--data",
        p(&csv),
        "--epochs",
        "1",
        "--out",
        p(dir.path()),
    ]);
    assert!(
        msg.contains("foo") && msg.contains("bar") && !msg.contains("x1"),
        "{msg}"
    );
    ok(&[
        "train",
        "--data",
        p(&csv),
        "--epochs",
        "1",
        "--centers",
        "foo=2,bar=1.5",
        "--out",
        p(dir.path()),
    ]);
}

#[test]
fn bad_cells_report_their_row() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "x1,label\n0.5,1\nNaN,0\n").unwrap();
    let msg = err(&["train", "--data", p(&csv), "--out", p(dir.path())]);
    assert!(msg.contains("row"), "{msg}");
    fs::write(&csv, "x1,label\n0.5,1\n0.2,2\n").unwrap();
    err(&["train", "--data", p(&csv), "--out", p(dir.path())]);
}

#[test]
fn batch_larger_than_dataset_trains() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "mock1", "100");
    ok(&[
        "train",
        "--data",
        p(&dir.path().join("mock1_train.csv")),
        "--epochs",
        "2",
        "--batch-size",
        "512",
        "--out",
        p(dir.path()),
    ]);
    let history = fs::read_to_string(dir.path().join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 3);
}

#[test]
fn eval_writes_metrics_table() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    gen(d, "mock1", "2000");
    ok(&[
        "train",
        "--data",
        p(&d.join("mock1_train.csv")),
        "--epochs",
        "2",
        "--out",
        p(d),
    ]);
    let out = ok(&[
        "eval",
        "--model",
        p(&d.join("model.json")),
        "--data",
        p(&d.join("mock1_test.csv")),
        "--physics",
        "diboson",
        "--out",
        p(d),
    ]);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("Model"), "{table}");
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("metrics.json")).unwrap()).unwrap();
    let total: u64 = ["tp", "fp", "tn", "fn"]
        .iter()
        .map(|k| metrics[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 1000);
}
