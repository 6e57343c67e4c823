use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pco")).args(args).output().expect("run pco")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("experiment.toml");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn sync_config_writes_stable_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
kind = "sync-delay"
[topology]
nodes = 3
edges = [[0, 1, 0.01], [1, 2, 0.02]]
[sync]
alpha = 0.1
max_periods = 5000
[seeds]
base = 5
trials = 12
"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let res = pco(&["sync", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
        assert_eq!(summary["rng"], "chacha8");
        assert_eq!(summary["groups"][0]["aggregate"]["trials"], 12);
    }
    for name in ["trials.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let csv = fs::read_to_string(a.join("trials.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("seed,converged,time,delta_max,head"));
    assert_eq!(lines.next().unwrap().split(',').next(), Some("5"));
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn overrides_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("frames.jsonl");
    let res = pco(&[
        "sched",
        "--preset",
        "single-clique",
        "--seed",
        "9",
        "--trials",
        "3",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(summary["base_seed"], 9);
    assert_eq!(summary["groups"][0]["aggregate"]["prediction_matches"], 3);
    let first = fs::read_to_string(&trace).unwrap();
    let rec: serde_json::Value = serde_json::from_str(first.lines().next().unwrap()).unwrap();
    assert!(rec["phi"].is_number() && rec["psi"].is_number());
}

#[test]
fn spectral_and_bounds() {
    let res = pco(&["spectral", "--preset", "spectral-n8"]);
    assert!(res.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let l2 = summary["spectral"]["lambda2_exact"].as_f64().unwrap();
    assert!((l2 - 0.962525).abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "kind = \"sync\"\n[topology]\ngenerator = \"line\"\nsize = 5\ntau = 0.0625\n",
    );
    let res = pco(&["bounds", "--config", &cfg]);
    assert!(res.status.success());
    let b: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!((b["best"].as_f64().unwrap() - 0.125).abs() < 1e-12);
    assert!((b["worst"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "kind = \"sync\"\nunknown_key = 3\n");
    assert_eq!(pco(&["sync", "--config", &bad]).status.code(), Some(2));
    assert_eq!(pco(&["sync", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(pco(&["sync", "--preset", "spectral-n8"]).status.code(), Some(2));
    assert_eq!(pco(&["sync"]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(pco(&["sched", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn non_convergence_keeps_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
kind = "sync"
[topology]
nodes = 4
edges = [[0, 1], [1, 2], [2, 3], [3, 0]]
[sync]
alpha = 0.0001
max_periods = 2
[seeds]
trials = 4
"#,
    );
    let res = pco(&["sync", "--config", &cfg]);
    let summary: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let converged = summary["groups"][0]["aggregate"]["converged"].as_u64().unwrap();
    assert!(converged < 4);
    assert_eq!(res.status.code(), Some(0));
}
