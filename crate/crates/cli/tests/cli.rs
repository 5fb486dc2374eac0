//! End-to-end runs of the `hoegkit` binary: exit codes, file outputs, and
//! determinism of repeated runs.

use std::path::Path;
use std::process::{Command, Output};

use hoegkit::commands::metrics_without_timing;
use hoegkit::metrics::read_metrics;

fn hoegkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hoegkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture_file(dir: &Path) -> String {
    let path = dir.join("otc.jsonocel");
    let out = hoegkit(&["fixture", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    path.to_str().unwrap().to_string()
}

#[test]
fn fixture_is_byte_identical_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonocel");
    let b = dir.path().join("b.jsonocel");
    assert!(hoegkit(&["fixture", "--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(hoegkit(&["fixture", "--out", b.to_str().unwrap()])
        .status
        .success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let out = hoegkit(&["validate", a.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("10 events"));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());

    // truncated JSON -> usage/parse error
    let broken = dir.path().join("broken.jsonocel");
    let text = std::fs::read_to_string(&fixture).unwrap();
    std::fs::write(&broken, &text[..text.len() / 2]).unwrap();
    let out = hoegkit(&["validate", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // dangling object reference -> domain violation naming the event
    let dangling = dir.path().join("dangling.jsonocel");
    std::fs::write(&dangling, text.replacen("\"i1\",", "\"iX\",", 1)).unwrap();
    let out = hoegkit(&["validate", dangling.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("iX"));

    // declared object, but an event referencing it under the wrong type
    let wrong_type = dir.path().join("wrong.jsonocel");
    std::fs::write(
        &wrong_type,
        text.replace(
            "\"ocel:type\": \"delivery\"",
            "\"ocel:type\": \"delivery2\"",
        ),
    )
    .unwrap();
    let out = hoegkit(&["validate", wrong_type.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "type rename stays consistent");

    let missing = hoegkit(&[
        "validate",
        dir.path().join("nope.jsonocel").to_str().unwrap(),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn stats_row_matches_expected() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let out = hoegkit(&["stats", &fixture]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "events=10 objects=8 types=4 cases=1 mean_interactions=3.10"
    );

    let out = hoegkit(&["stats", &fixture, "--extraction", "leading:item"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("cases=3"));
}

#[test]
fn extract_writes_executions() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let out_dir = dir.path().join("extracted");
    let out = hoegkit(&[
        "extract",
        &fixture,
        "--extraction",
        "leading:item",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("executions.json")).unwrap()).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 3);
}

#[test]
fn encode_writes_graphs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let out_dir = dir.path().join("encoded");
    let out = hoegkit(&[
        "encode",
        "--input",
        &fixture,
        "--out",
        out_dir.to_str().unwrap(),
        "--splits",
        "1.0,0.0,0.0",
        "--encoder",
        "hoeg",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    let graphs = manifest["graphs"].as_array().unwrap();
    assert_eq!(graphs.len(), 1);
    assert_eq!(graphs[0]["split"], "train");
    let file = graphs[0]["file"].as_str().unwrap();
    let graph = hoegkit::graphs::parse_hoeg(&std::fs::read(out_dir.join(file)).unwrap()).unwrap();
    assert_eq!(graph.event_count(), 10);
    assert_eq!(graph.node_types.len(), 5);
}

#[test]
fn train_run_is_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let run = |out_dir: &Path| {
        let out = hoegkit(&[
            "train",
            "--input",
            &fixture,
            "--out",
            out_dir.to_str().unwrap(),
            "--extraction",
            "leading:item",
            "--splits",
            "0.4,0.3,0.3",
            "--seed",
            "5",
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        read_metrics(&out_dir.join("metrics.csv")).unwrap()
    };
    let first = run(&dir.path().join("run1"));
    let second = run(&dir.path().join("run2"));
    assert_eq!(
        metrics_without_timing(&first),
        metrics_without_timing(&second)
    );
    assert!(first.iter().any(|r| r.model == "median"));
    assert!(dir.path().join("run1/checkpoint.json").exists());
    assert!(dir.path().join("run1/report.json").exists());
}

#[test]
fn evaluate_reproduces_training_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let out_dir = dir.path().join("train");
    let args_tail = [
        "--input",
        &fixture,
        "--extraction",
        "leading:item",
        "--splits",
        "0.4,0.3,0.3",
        "--seed",
        "5",
    ];
    let mut train_args = vec!["train", "--out", out_dir.to_str().unwrap()];
    train_args.extend(args_tail);
    assert_eq!(hoegkit(&train_args).status.code(), Some(0));

    let eval_dir = dir.path().join("eval");
    let checkpoint = out_dir.join("checkpoint.json");
    let mut eval_args = vec![
        "evaluate",
        "--out",
        eval_dir.to_str().unwrap(),
        "--checkpoint",
        checkpoint.to_str().unwrap(),
    ];
    eval_args.extend(args_tail);
    assert_eq!(hoegkit(&eval_args).status.code(), Some(0));

    let trained = read_metrics(&out_dir.join("metrics.csv")).unwrap();
    let evaluated = read_metrics(&eval_dir.join("metrics.csv")).unwrap();
    for row in &evaluated {
        let matching = trained
            .iter()
            .find(|r| r.model == row.model && r.split == row.split)
            .unwrap();
        assert_eq!(matching.mae, row.mae);
        assert_eq!(matching.mse, row.mse);
    }
}

#[test]
fn grid_emits_sorted_rows() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let out_dir = dir.path().join("grid");
    let out = hoegkit(&[
        "grid",
        "--input",
        &fixture,
        "--out",
        out_dir.to_str().unwrap(),
        "--extraction",
        "leading:item",
        "--splits",
        "0.4,0.3,0.3",
        "--hidden-dims",
        "16,8",
        "--learning-rates",
        "0.01,0.001",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = read_metrics(&out_dir.join("grid.csv")).unwrap();
    let models: Vec<&str> = rows.iter().map(|r| r.model.as_str()).collect();
    assert_eq!(
        models,
        [
            "hoeg[hd=8,lr=0.001]",
            "hoeg[hd=8,lr=0.01]",
            "hoeg[hd=16,lr=0.001]",
            "hoeg[hd=16,lr=0.01]",
        ]
    );
}

#[test]
fn thread_env_var_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture_file(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_hoegkit"))
        .env("HOEGKIT_THREADS", "1")
        .args(["stats", &fixture])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let bad = Command::new(env!("CARGO_BIN_EXE_hoegkit"))
        .env("HOEGKIT_THREADS", "many")
        .args(["stats", &fixture])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
