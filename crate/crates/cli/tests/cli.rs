use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hgut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgut")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hgut-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn corpus(dir: &Path, generator: &str, shape: &str, count: &str) -> Vec<PathBuf> {
    let o = hgut(&[
        "corpus",
        "--generator",
        generator,
        "--shape",
        shape,
        "--count",
        count,
        "--seed",
        "4",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(PathBuf::from)
        .collect()
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&hgut(&[])), 2);
    assert_eq!(code(&hgut(&["frobnicate"])), 2);
    assert_eq!(code(&hgut(&["verify", "--suite", "nope"])), 2);
    assert_eq!(
        code(&hgut(&["test", "--dist", "/nonexistent.json", "--eps", "0.25"])),
        2
    );
    assert_eq!(code(&hgut(&["--help"])), 0);
}

#[test]
fn verify_prints_reports_and_detects_faults() {
    let o = hgut(&["verify", "--corpus-size", "2", "--max-cells", "36"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v.as_array().unwrap().is_empty());

    let o = hgut(&["verify", "--suite", "lemmas", "--corpus-size", "2", "--fault"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed checks"));
}

#[test]
fn corpus_then_test() {
    let dir = scratch("test");
    let files = corpus(&dir, r#"{"kind":"uniform"}"#, "3,3", "1");
    assert_eq!(files.len(), 1);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(doc["shape"], serde_json::json!([3, 3]));
    let dist = files[0].to_str().unwrap();

    let o = hgut(&[
        "test", "--dist", dist, "--eps", "0.25", "--trials", "3", "--out", "json",
    ]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);

    let o = hgut(&[
        "test",
        "--dist",
        dist,
        "--eps",
        "0.25",
        "--trials",
        "3",
        "--max-accept-rate",
        "0",
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&hgut(&["test", "--dist", dist, "--eps", "0.9"])), 2);
    assert_eq!(
        code(&hgut(&["test", "--dist", dist, "--eps", "0.25", "--trials", "0"])),
        2
    );

    let atom = corpus(&dir, r#"{"kind":"heavy_atom","mass":1.0}"#, "2,2", "1");
    let o = hgut(&[
        "test",
        "--dist",
        atom[0].to_str().unwrap(),
        "--eps",
        "0.25",
        "--max-accept-rate",
        "0",
    ]);
    assert_eq!(code(&o), 0);
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn corpus_from_config_file() {
    let dir = scratch("cfg");
    let cfg = dir.join("spec.json");
    fs::write(
        &cfg,
        r#"{"generator":{"kind":"dirichlet","alpha":0.2},"shape":[3,3],"count":3,"floor":0.2,"seed":1}"#,
    )
    .unwrap();
    let out = dir.join("out");
    let o = hgut(&[
        "corpus",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read_dir(&out).unwrap().count(), 3);
    for e in fs::read_dir(&out).unwrap() {
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(e.unwrap().path()).unwrap()).unwrap();
        assert!(doc["tv"].as_f64().unwrap() >= 0.2);
    }
    let o = hgut(&[
        "corpus",
        "--generator",
        "not json",
        "--shape",
        "3",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let _ = fs::remove_dir_all(dir);
}

#[test]
fn sweep_writes_results_and_checks_assertions() {
    let dir = scratch("sweep");
    let spec = dir.join("exp.json");
    fs::write(
        &spec,
        r#"{"name":"atoms","generator":{"kind":"heavy_atom","mass":1.0},"shapes":[[2,2],[2,2,2]],
            "eps":[0.25],"trials":3,"mode":"practical","seed":2,"max_accept_rate":0.0}"#,
    )
    .unwrap();
    let out = dir.join("res.csv");
    let o = hgut(&[
        "sweep",
        "--config",
        spec.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--out",
        "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scaling"));
    let written = fs::read_to_string(&out).unwrap();
    assert_eq!(written, String::from_utf8(o.stdout).unwrap());
    assert_eq!(written.lines().filter(|l| !l.starts_with('#')).count(), 3);

    let bad = dir.join("bad.json");
    fs::write(
        &bad,
        r#"{"name":"x","generator":{"kind":"heavy_atom","mass":1.0},"shapes":[[2,2]],
            "eps":[0.25],"trials":2,"mode":"practical","seed":2,"min_accept_rate":1.0}"#,
    )
    .unwrap();
    assert_eq!(code(&hgut(&["sweep", "--config", bad.to_str().unwrap()])), 1);

    let zero = dir.join("zero.json");
    fs::write(
        &zero,
        r#"{"name":"x","generator":{"kind":"uniform"},"shapes":[[2,2]],"eps":[0.25],"trials":0,"mode":"practical","seed":2}"#,
    )
    .unwrap();
    assert_eq!(code(&hgut(&["sweep", "--config", zero.to_str().unwrap()])), 2);
    let _ = fs::remove_dir_all(dir);
}
