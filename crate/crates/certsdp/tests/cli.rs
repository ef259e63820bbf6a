//! End-to-end runs of the command-line binary: generate, verify, solve with
//! a trace, and bench over a directory, including the exit-code contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_certsdp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_verify_solve_trace_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let trace = dir.path().join("trace.jsonl");
    let report = dir.path().join("solution.json");

    let out = run(&[
        "generate",
        "--n",
        "40",
        "--k",
        "3",
        "--m",
        "5",
        "--seed",
        "4",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(inst.is_file());

    let out = run(&["verify", "--instance", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let out = run(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--schedule",
        "linear:50",
        "--max-seconds",
        "300",
        "--trace",
        trace.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("status=solved"), "{}", stdout(&out));

    // Trace is JSON lines with known event tags.
    let trace_text = fs::read_to_string(&trace).unwrap();
    let mut seen_dual = false;
    let mut seen_ball = false;
    for line in trace_text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        match v["event"].as_str().unwrap() {
            "dual" => seen_dual = true,
            "ball_attempt" | "ball_result" => seen_ball = true,
            "agd" => {}
            other => panic!("unknown trace event {other}"),
        }
    }
    assert!(seen_dual && seen_ball, "trace is missing event kinds");

    // The written solution verifies against the instance.
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["status"], "solved");
    let out = run(&[
        "verify",
        "--instance",
        inst.to_str().unwrap(),
        "--solution",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
}

#[test]
fn bench_writes_csv_and_survives_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    for seed in [1u64, 2] {
        let inst = dir.path().join(format!("inst{seed}.json"));
        let out = run(&[
            "generate",
            "--n",
            "25",
            "--k",
            "2",
            "--m",
            "3",
            "--seed",
            &seed.to_string(),
            "--out",
            inst.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    fs::write(dir.path().join("broken.json"), "{ not json").unwrap();

    let csv = dir.path().join("bench.csv");
    let out = run(&[
        "bench",
        "--instances",
        dir.path().to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,n_minus_k,k,m,time_sec,dist_sq,residual,status"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3, "one row per input file: {text}");
    assert_eq!(rows.iter().filter(|r| r.ends_with("solved")).count(), 2);
    assert_eq!(rows.iter().filter(|r| r.ends_with("error")).count(), 1);
}

#[test]
fn exit_codes_for_usage_and_unsolved() {
    // Unknown flag: usage error, exit 1.
    let out = run(&["solve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));

    // Missing file: runtime error, exit 1.
    let out = run(&["solve", "--instance", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(1));

    // A solve that cannot finish within the budget: exit 2.
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let out = run(&[
        "generate",
        "--n",
        "60",
        "--seed",
        "3",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "solve",
        "--instance",
        inst.to_str().unwrap(),
        "--max-seconds",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(
        stdout(&out).contains("status=budget_exhausted"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn verify_rejects_corrupted_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let out = run(&[
        "generate",
        "--n",
        "20",
        "--k",
        "2",
        "--m",
        "3",
        "--seed",
        "9",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Corrupt one scalar of the planted optimum.
    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&inst).unwrap()).unwrap();
    let c = doc["ground_truth"]["opt"].as_f64().unwrap();
    doc["ground_truth"]["opt"] = serde_json::json!(c + 0.5);
    fs::write(&inst, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run(&["verify", "--instance", inst.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn trace_is_append_only_json_and_solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run(&[
        "generate",
        "--n",
        "30",
        "--k",
        "2",
        "--m",
        "4",
        "--seed",
        "6",
        "--out",
        inst.to_str().unwrap(),
    ]);
    let solve_to = |report: &Path| -> String {
        let out = run(&[
            "solve",
            "--instance",
            inst.to_str().unwrap(),
            "--schedule",
            "linear:50",
            "--report",
            report.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
        let doc: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
        serde_json::to_string(&doc["X"]).unwrap()
    };
    let a = solve_to(&dir.path().join("a.json"));
    let b = solve_to(&dir.path().join("b.json"));
    assert_eq!(a, b, "repeat solves must be bit-identical");
}
