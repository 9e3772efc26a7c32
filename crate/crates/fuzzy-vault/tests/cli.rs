//! End-to-end tests of the command-line interface: worked transform examples,
//! enrol/verify round trips, exit codes, and benchmark report generation.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fuzzy-vault"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Deterministic pseudo-random embedding rows for two identities.
fn write_corpus(path: &Path, n: usize) {
    let mut state = 0x2545F4914F6CDD1Du64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut text = String::new();
    for label in ["alice", "bob"] {
        for _ in 0..2 {
            text.push_str(label);
            for _ in 0..n {
                text.push_str(&format!(",{:.6}", next()));
            }
            text.push('\n');
        }
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn transform_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("v.csv");
    std::fs::write(&input, "sample,-0.6,0.3,1.2,-0.9,0.5,-1.1,0.7,0.1\n").unwrap();

    let out = run(&["transform", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let line: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(line["label"], "sample");
    assert_eq!(line["elements"], serde_json::json!([1, 2, 4, 6]));

    let out = run(&["transform", "--input", input.to_str().unwrap(), "--quantizer", "sign"]);
    assert!(out.status.success());
    let line: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(line["elements"], serde_json::json!([1, 2, 4, 6, 7]));
}

#[test]
fn transform_empty_input_is_empty_success() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    std::fs::write(&input, "").unwrap();
    let out = run(&["transform", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
}

#[test]
fn enroll_verify_round_trip_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    write_corpus(&corpus, 64);
    let record = dir.path().join("record.json");

    let out = run(&[
        "enroll", "--input", corpus.to_str().unwrap(), "--label", "alice",
        "--k", "20", "--record-id", "cli-test-1", "--seed", "5",
        "--out", record.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("kappa_hash:"));
    assert!(record.exists());

    // same sample matches: exit 0
    let out = run(&[
        "verify", "--record", record.to_str().unwrap(),
        "--probe", corpus.to_str().unwrap(), "--label", "alice",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("MATCH"));

    // different identity: exit 3
    let out = run(&[
        "verify", "--record", record.to_str().unwrap(),
        "--probe", corpus.to_str().unwrap(), "--label", "bob",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).starts_with("NO-MATCH"));

    // k larger than the feature set: exit 2
    let out = run(&[
        "enroll", "--input", corpus.to_str().unwrap(), "--label", "alice",
        "--k", "40", "--record-id", "cli-test-2", "--seed", "5",
        "--out", dir.path().join("r2.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));

    // probe with mismatched dimensionality: exit 2
    let bad_probe = dir.path().join("bad.csv");
    write_corpus(&bad_probe, 32);
    let out = run(&[
        "verify", "--record", record.to_str().unwrap(),
        "--probe", bad_probe.to_str().unwrap(), "--label", "alice",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enroll_writes_key_only_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    write_corpus(&corpus, 64);
    let record = dir.path().join("record.json");
    let key = dir.path().join("key.json");

    let out = run(&[
        "enroll", "--input", corpus.to_str().unwrap(), "--label", "bob",
        "--k", "12", "--record-id", "cli-key-test", "--seed", "9",
        "--out", record.to_str().unwrap(), "--key-out", key.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let key_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&key).unwrap()).unwrap();
    assert_eq!(key_json["k"], serde_json::json!(12));
    let coeffs: Vec<String> = key_json["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect();
    assert_eq!(coeffs.len(), 12);
    // the secret never reaches stdout or the record file
    let printed = stdout(&out);
    let record_text = std::fs::read_to_string(&record).unwrap();
    let secret_hex = coeffs.concat();
    assert!(!printed.contains(&secret_hex));
    assert!(!record_text.contains(&secret_hex));
}

#[test]
fn transform_features_feed_enroll_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    write_corpus(&corpus, 64);
    let features = dir.path().join("features.jsonl");
    let record = dir.path().join("record.json");

    let out = run(&[
        "transform", "--input", corpus.to_str().unwrap(),
        "--out", features.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&features).unwrap().lines().count(), 4);

    let out = run(&[
        "enroll", "--features", features.to_str().unwrap(), "--label", "alice",
        "--n", "64", "--k", "16", "--record-id", "cli-feat-test", "--seed", "2",
        "--out", record.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&[
        "verify", "--record", record.to_str().unwrap(),
        "--features", features.to_str().unwrap(), "--label", "alice",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn benchmark_writes_deterministic_reports() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("rep");
    let args = [
        "benchmark", "--synthetic", "--identities", "6", "--samples", "2",
        "--dim", "64", "--sigma", "0.3", "--seed", "3", "--k-list", "4,8,12",
        "--t-ratio", "4",
    ];
    let run_once = |prefix: &str| {
        let mut all: Vec<&str> = args.to_vec();
        all.extend_from_slice(&["--out", prefix]);
        let out = run(&all);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(format!("{prefix}.csv")).unwrap()
    };
    let first = run_once(prefix.to_str().unwrap());
    assert_eq!(first.lines().count(), 4, "header plus one row per k");
    assert!(first.starts_with("k,gmr,fmr,t,fas_bits"));
    // same seed, same results
    let second = run_once(dir.path().join("rep2").to_str().unwrap());
    assert_eq!(first, second);
    assert!(dir.path().join("rep.json").exists());
}

#[test]
fn benchmark_compare_transforms_emits_paired_reports() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("cmp");
    let out = run(&[
        "benchmark", "--synthetic", "--identities", "4", "--samples", "2",
        "--dim", "64", "--sigma", "0.3", "--seed", "3", "--k-list", "8",
        "--t-ratio", "4", "--compare-transforms",
        "--out", prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for suffix in ["-sign.csv", "-sign.json", "-eqf.csv", "-eqf.json"] {
        assert!(
            dir.path().join(format!("cmp{suffix}")).exists(),
            "missing cmp{suffix}"
        );
    }
}
