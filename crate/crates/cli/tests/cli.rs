use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use plandiv_core::io::{read_labels, read_tasks};
use plandiv_core::nl::{write_responses, FinetuneRecord};
use plandiv_core::render_plan;
use serde_json::Value;

fn plandiv(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plandiv")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = plandiv(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn generate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        fs::create_dir(dir).unwrap();
        ok(dir, &["--seed", "9", "generate", "--out", "tasks.jsonl", "--count", "50", "--n-blocks", "4"]);
    }
    for name in ["tasks.jsonl", "tasks.jsonl.manifest.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    ok(&a, &["--seed", "10", "generate", "--out", "other.jsonl", "--count", "50", "--n-blocks", "4"]);
    assert_ne!(fs::read(a.join("tasks.jsonl")).unwrap(), fs::read(a.join("other.jsonl")).unwrap());
    let manifest: Value = serde_json::from_slice(&fs::read(a.join("tasks.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["outputs"][0]["path"], "tasks.jsonl");
    assert!(manifest["config"].get("jobs").is_none());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(&plandiv(dir, &["generate", "--bogus"])), 1);
    assert_eq!(code(&plandiv(dir, &["--help"])), 0);
    assert_eq!(code(&plandiv(dir, &["solve", "--tasks", "missing.jsonl", "--out", "l.jsonl"])), 2);
    // only 4968 distinct 4-block tasks exist
    assert_eq!(code(&plandiv(dir, &["generate", "--out", "t.jsonl", "--count", "5000", "--n-blocks", "4"])), 2);
    fs::write(dir.join("bad.toml"), "[generate]\ncolour = 1\n").unwrap();
    assert_eq!(code(&plandiv(dir, &["--config", "bad.toml", "generate", "--out", "t.jsonl"])), 1);

    ok(dir, &["generate", "--out", "t.jsonl", "--count", "20", "--n-blocks", "6"]);
    let out = plandiv(dir, &["solve", "--tasks", "t.jsonl", "--out", "l.jsonl", "--max-nodes", "2"]);
    assert_eq!(code(&out), 3);
    let labels = read_labels(fs::read(dir.join("l.jsonl")).unwrap().as_slice()).unwrap();
    assert_eq!(labels.len(), 20, "labels are still written");
}

#[test]
fn mixed_domain_emit() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for (d, extra) in [("blocksworld", vec!["--n-blocks", "4"]), ("logistics", vec![])] {
        let tasks = format!("{d}.jsonl");
        let labels = format!("{d}-labels.jsonl");
        let emb = format!("{d}-emb.jsonl");
        let mut gen = vec!["--seed", "3", "generate", "--out", &tasks, "--domain", d, "--count", "300"];
        gen.extend(extra);
        ok(dir, &gen);
        ok(dir, &["solve", "--tasks", &tasks, "--out", &labels]);
        ok(dir, &["embed", "--tasks", &tasks, "--out", &emb]);
        ok(dir, &["select", "--tasks", &tasks, "--embeddings", &emb, "--k", "100", "--out-dir", &format!("sel-{d}")]);
        let selection: Value =
            serde_json::from_slice(&fs::read(dir.join(format!("sel-{d}/selection.json"))).unwrap()).unwrap();
        assert_eq!(selection["selected_ids"].as_array().unwrap().len(), 100);
    }
    ok(
        dir,
        &[
            "emit",
            "--tasks",
            "sel-blocksworld/selected.jsonl",
            "sel-logistics/selected.jsonl",
            "--labels",
            "blocksworld-labels.jsonl",
            "logistics-labels.jsonl",
            "--prompt",
            "one-shot",
            "--out",
            "mixed.jsonl",
        ],
    );
    let text = fs::read_to_string(dir.join("mixed.jsonl")).unwrap();
    let records: Vec<FinetuneRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 200);
    let bw = records.iter().filter(|r| r.messages[0].content.contains("I am playing with a set of blocks")).count();
    assert_eq!(bw, 100);
}

#[test]
fn validate_reports_each_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["generate", "--out", "t.jsonl", "--count", "6", "--n-blocks", "4"]);
    ok(dir, &["solve", "--tasks", "t.jsonl", "--out", "l.jsonl"]);
    let tasks = read_tasks(fs::read(dir.join("t.jsonl")).unwrap().as_slice()).unwrap();
    let labels = read_labels(fs::read(dir.join("l.jsonl")).unwrap().as_slice()).unwrap();
    let plan = |i: usize| labels[i].plan.clone().unwrap();
    let mut truncated = plan(2);
    truncated.0.pop();
    let responses = vec![
        (tasks[0].id().to_owned(), format!("Sure.\n{}\nDone.", render_plan(&plan(0)))),
        (tasks[1].id().to_owned(), render_plan(&plan(1))),
        (tasks[2].id().to_owned(), render_plan(&truncated)),
        (tasks[3].id().to_owned(), "[PLAN]\nfly the blue block to the moon\n[PLAN END]".to_owned()),
        (tasks[4].id().to_owned(), render_plan(&plan(1))),
    ];
    let mut buf = Vec::new();
    write_responses(&responses, &mut buf).unwrap();
    fs::write(dir.join("r.jsonl"), buf).unwrap();

    for (labels, out) in [(Some("l.jsonl"), "with-labels"), (None, "solved-here")] {
        let mut args = vec!["validate", "--tasks", "t.jsonl", "--responses", "r.jsonl", "--out-dir", out];
        if let Some(l) = labels {
            args.extend(["--labels", l]);
        }
        ok(dir, &args);
        let report: Value = serde_json::from_slice(&fs::read(dir.join(out).join("report.json")).unwrap()).unwrap();
        assert_eq!(report["n_tasks"], 6);
        assert_eq!(report["n_solved"], 2);
        assert_eq!(report["optimality_rate"], 1.0);
        assert_eq!(report["failures"]["parse_error"], 1);
        assert_eq!(report["failures"]["missing"], 1);
        let wrong = report["failures"]["goal_not_satisfied"].as_u64().unwrap_or(0)
            + report["failures"]["precondition_violation"].as_u64().unwrap_or(0);
        assert_eq!(wrong, 2);
        assert!(dir.join(out).join("histogram.md").exists());
    }
    assert_eq!(
        fs::read(dir.join("with-labels/report.json")).unwrap(),
        fs::read(dir.join("solved-here/report.json")).unwrap()
    );
}

#[test]
fn pddl_export() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["generate", "--out", "t.jsonl", "--domain", "logistics", "--count", "3"]);
    ok(dir, &["solve", "--tasks", "t.jsonl", "--out", "l.jsonl"]);
    ok(dir, &["pddl", "--tasks", "t.jsonl", "--labels", "l.jsonl", "--out-dir", "pddl"]);
    let tasks = read_tasks(fs::read(dir.join("t.jsonl")).unwrap().as_slice()).unwrap();
    assert!(fs::read_to_string(dir.join("pddl/domain-logistics.pddl")).unwrap().contains("(define (domain"));
    for t in &tasks {
        let problem = fs::read_to_string(dir.join(format!("pddl/{}.pddl", t.id()))).unwrap();
        assert!(problem.contains(&format!("(problem task-{})", t.id())));
        assert!(dir.join(format!("pddl/{}.plan", t.id())).exists());
    }
}
