use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chainstrength(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainstrength"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

const SMALL: &[&str] = &[
    "--sizes",
    "8",
    "--graphs-per-size",
    "2",
    "--num-reads",
    "20",
    "--num-sweeps",
    "50",
];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(tail).copied().collect()
}

fn strip_metadata(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn gen_then_refuse_then_force() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        chainstrength(dir.path(), &with(&["gen"], SMALL))
            .status
            .code(),
        Some(0)
    );
    let first = fs::read(dir.path().join("instances/n8_g0.dimacs")).unwrap();
    assert_eq!(
        chainstrength(dir.path(), &with(&["gen"], SMALL))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chainstrength(dir.path(), &with(&["gen", "--force"], SMALL))
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        fs::read(dir.path().join("instances/n8_g0.dimacs")).unwrap(),
        first
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = chainstrength(dir.path(), &["gen", "--sizes", "21", "--chimera-m", "5"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(
        chainstrength(dir.path(), &with(&["run", "--seed", "1"], SMALL))
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        chainstrength(dir.path(), &with(&["run"], SMALL))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chainstrength(dir.path(), &["gen", "--p", "1.5"])
            .status
            .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"no_such_field": 1}"#).unwrap();
    let out = chainstrength(dir.path(), &["gen", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_state_names_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    chainstrength(dir.path(), &with(&["gen"], SMALL));
    let out = chainstrength(
        dir.path(),
        &with(&["run", "--seed", "1", "--methods", "alm-set-plus"], SMALL),
    );
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("embedding"), "{err}");
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"sizes": [6], "graphs_per_size": 1}"#).unwrap();
    let out = chainstrength(
        dir.path(),
        &with(&["gen", "--config", cfg.to_str().unwrap()], SMALL),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("instances/n6_g0.dimacs").exists());
    assert!(!dir.path().join("instances/n8_g0.dimacs").exists());
}

#[test]
fn full_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run_args = with(
        &[
            "run",
            "--seed",
            "9",
            "--methods",
            "sm,pm,alm,alm-set,alm-set-plus",
        ],
        SMALL,
    );
    let train_args = with(&["train-set", "--seed", "9", "--train-graphs", "2"], SMALL);
    assert!(chainstrength(dir.path(), &with(&["gen"], SMALL))
        .status
        .success());
    assert!(chainstrength(dir.path(), &train_args).status.success());
    assert!(chainstrength(dir.path(), &run_args).status.success());
    let results = dir.path().join("results");
    let read = |name: &str| fs::read_to_string(results.join(name)).unwrap();
    let first: Vec<String> = [
        "iterations.csv",
        "summary.csv",
        "lambda_hist.csv",
        "chain_trace.csv",
    ]
    .iter()
    .map(|n| read(n))
    .collect();
    assert_eq!(chainstrength(dir.path(), &run_args).status.code(), Some(2));
    let forced = with(&run_args, &["--force"]);
    assert!(chainstrength(dir.path(), &forced).status.success());
    for (name, before) in [
        "iterations.csv",
        "summary.csv",
        "lambda_hist.csv",
        "chain_trace.csv",
    ]
    .iter()
    .zip(&first)
    {
        let after = read(name);
        let keep = |t: &str| {
            t.lines()
                .filter(|l| !l.starts_with("# generated_unix"))
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(keep(before), keep(&after), "{name}");
    }
    assert!(first[0].starts_with("# toolkit: chain-strength"));

    let summary = strip_metadata(&first[1]);
    assert!(chainstrength(dir.path(), &with(&["report"], SMALL))
        .status
        .success());
    assert_eq!(strip_metadata(&read("summary.csv")), summary);
    assert_eq!(summary.lines().count(), 1 + 5);
}
