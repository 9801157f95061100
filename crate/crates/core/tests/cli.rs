use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use needspace::harness::parse_csv;
use needspace::Snapshot;

fn needspace(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_needspace"))
        .args(args)
        .current_dir(cwd)
        .env_remove("NEEDSPACE_OUT_DIR")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

#[test]
fn run_writes_all_outputs_and_flags_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "c.json",
        r#"{"ticks": 50, "seed": 1, "out_dir": "from_file"}"#,
    );
    let out = needspace(
        &[
            "run", "--config", "c.json", "--seed", "4", "--ticks", "30", "--frames",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let dir = tmp.path().join("from_file");
    let rows = parse_csv(dir.join("metrics.csv")).unwrap();
    assert_eq!(rows.len(), 30);
    assert!(fs::read_to_string(dir.join("needs.svg"))
        .unwrap()
        .starts_with("<svg"));
    assert_eq!(
        fs::read_to_string(dir.join("frames.txt"))
            .unwrap()
            .matches('o')
            .count(),
        30
    );
    let snap: Snapshot = needspace::load_snapshot(dir.join("snapshot.json")).unwrap();
    assert_eq!(snap.log.len(), 30);

    let flagged = needspace(
        &["run", "--config", "c.json", "--ticks", "5", "--out", "flag"],
        tmp.path(),
    );
    assert_eq!(flagged.status.code(), Some(0));
    assert_eq!(parse_csv(tmp.path().join("flag/metrics.csv")).unwrap().len(), 5);
}

#[test]
fn env_var_sets_the_default_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.json", r#"{"ticks": 10}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_needspace"))
        .args(["run", "--config", "c.json"])
        .current_dir(tmp.path())
        .env("NEEDSPACE_OUT_DIR", tmp.path().join("envdir"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("envdir/metrics.csv").exists());
}

#[test]
fn config_errors_exit_1_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.json", r#"{"board": {"racket_width": 9}}"#);
    let out = needspace(&["run", "--config", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("board.racket_width"));

    write(tmp.path(), "typo.json", r#"{"exploration": 0.2}"#);
    let out = needspace(&["run", "--config", "typo.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exploration"));

    write(tmp.path(), "c.json", "{}");
    write(
        tmp.path(),
        "p.json",
        r#"[{"name": "x", "happy": 1, "sad": 1, "novelty": 0, "expectedness": 0}]"#,
    );
    let out = needspace(
        &[
            "sweep",
            "--config",
            "c.json",
            "--profiles",
            "p.json",
            "--seeds",
            "5..5",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn io_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = needspace(&["run", "--config", "missing.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    write(tmp.path(), "snap.json", "{\"version\": 99");
    assert_eq!(
        needspace(&["replay", "--snapshot", "snap.json"], tmp.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        needspace(&["plot", "--metrics", "none.csv", "--out", "x.svg"], tmp.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn replay_of_a_newer_snapshot_version_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.json", r#"{"ticks": 20}"#);
    assert!(
        needspace(&["run", "--config", "c.json", "--out", "o"], tmp.path())
            .status
            .success()
    );
    let path = tmp.path().join("o/snapshot.json");
    let text = fs::read_to_string(&path)
        .unwrap()
        .replacen("\"version\": 1", "\"version\": 2", 1);
    fs::write(&path, text).unwrap();
    let out = needspace(&["replay", "--snapshot", "o/snapshot.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_baseline_and_plot() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.json", r#"{"ticks": 300}"#);
    write(
        tmp.path(),
        "p.json",
        r#"[{"name": "asym", "happy": 1, "sad": 0.25, "novelty": 0.1, "expectedness": 0.1},
            {"name": "sym", "happy": 1, "sad": 1, "novelty": 0.1, "expectedness": 0.1}]"#,
    );
    let out = needspace(
        &[
            "sweep",
            "--config",
            "c.json",
            "--profiles",
            "p.json",
            "--seeds",
            "0..3",
            "--out",
            "s",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let runs = fs::read_to_string(tmp.path().join("s/runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 6);
    let summary = fs::read_to_string(tmp.path().join("s/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2);

    let out = needspace(
        &["baseline", "--config", "c.json", "--ticks", "20000"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("random baseline hit rate 0.1"));

    assert!(
        needspace(&["run", "--config", "c.json", "--out", "r"], tmp.path())
            .status
            .success()
    );
    let out = needspace(
        &["plot", "--metrics", "r/metrics.csv", "--out", "again.svg"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read(tmp.path().join("again.svg")).unwrap(),
        fs::read(tmp.path().join("r/needs.svg")).unwrap()
    );
}
