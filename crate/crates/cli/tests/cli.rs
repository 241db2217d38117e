use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/data")
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus.jsonl")
}

fn t2v(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_t2v")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn parse_prints_the_tree_and_canonicalizes_on_request() {
    let vql = "Visualize BAR SELECT Genre , COUNT(*) FROM Movies GROUP BY Genre";
    let raw = stdout_json(&t2v(&["parse", vql]));
    assert_eq!(raw["chart"], "BAR");
    assert_eq!(raw["x"]["column"], "Genre");
    let canon = stdout_json(&t2v(&["parse", vql, "--db", "cinema", "--data-dir", s(&data_dir())]));
    assert_eq!(canon["x"]["column"], "genre");
    assert_eq!(canon["x"]["table"], "movies");
}

#[test]
fn exit_codes_separate_usage_from_validation() {
    let bad = t2v(&["parse", "Visualize BAR SELECT"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("syntax error"));
    assert_eq!(t2v(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(t2v(&["split", "--corpus", "x.jsonl"]).status.code(), Some(2));
    let no_schemas = t2v(&["stats", "--corpus", s(&corpus())]);
    assert_eq!(no_schemas.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&no_schemas.stderr).contains("--schemas"));
    assert_eq!(t2v(&["stats", "--corpus", "/nonexistent.jsonl", "--data-dir", s(&data_dir())]).status.code(), Some(1));
    assert_eq!(t2v(&["--help"]).status.code(), Some(0));
}

#[test]
fn compile_writes_the_golden_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pie.json");
    let vql = "Visualize PIE SELECT region , SUM(amount) FROM sales GROUP BY region";
    let run = t2v(&["compile", vql, "--db", "tiny", "--data-dir", s(&data_dir()), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(0));
    let golden = data_dir().join("../golden/pie.vl.json");
    assert_eq!(std::fs::read_to_string(out).unwrap(), std::fs::read_to_string(golden).unwrap());
    let missing = t2v(&["compile", vql, "--db", "nope", "--data-dir", s(&data_dir())]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("\"stage\":\"load\""));
}

#[test]
fn split_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let syn = dir.path().join("syn.jsonl");
    let d = data_dir();
    assert_eq!(t2v(&["synth", "--data-dir", s(&d), "--n", "120", "--seed", "4", "--out", s(&syn)]).status.code(), Some(0));
    for mode in ["question", "query", "database"] {
        let mut outputs = Vec::new();
        for run in ["a", "b"] {
            let out = dir.path().join(format!("{mode}-{run}"));
            let args = ["split", "--corpus", s(&syn), "--data-dir", s(&d), "--mode", mode, "--ratios", "0.7,0.15,0.15", "--seed", "1", "--out", s(&out)];
            let summary = stdout_json(&t2v(&args));
            assert_eq!(summary["mode"], mode);
            let files: Vec<String> = ["train", "dev", "test"]
                .iter()
                .map(|p| std::fs::read_to_string(out.join(format!("{p}.jsonl"))).unwrap())
                .collect();
            let lines: usize = files.iter().map(|f| f.lines().count()).sum();
            assert_eq!(lines, 120);
            outputs.push(files);
        }
        assert_eq!(outputs[0], outputs[1], "{mode}");
    }
}

#[test]
fn eval_of_gold_against_itself_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.jsonl");
    let lines: String = std::fs::read_to_string(corpus())
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            format!("{}\n", serde_json::json!({"id": v["id"], "candidates": [v["vql"]]}))
        })
        .collect();
    std::fs::write(&pred, lines).unwrap();
    let report = dir.path().join("report.json");
    let run = t2v(&["eval", "--gold", s(&corpus()), "--pred", s(&pred), "--data-dir", s(&data_dir()), "--out", s(&report)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).contains("Tree matching accuracy"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["tree_acc"]["overall"]["accuracy"], 1.0);
    for k in ["1", "3", "5", "all"] {
        assert_eq!(r["topk_acc"][k], 1.0);
    }
    for col in ["vis", "axis", "where", "join", "group", "binning", "order"] {
        assert_eq!(r["component_table"]["overall"][col], 1.0, "{col}");
    }
    assert_eq!(r["error_counts"]["failures"], 0);
}

#[test]
fn stats_and_synth_are_deterministic() {
    let d = data_dir();
    let stats = stdout_json(&t2v(&["stats", "--corpus", s(&corpus()), "--data-dir", s(&d)]));
    assert_eq!(stats["total"], 16);
    let a = t2v(&["synth", "--schemas", s(&d.join("schemas.json")), "--n", "30", "--seed", "9"]);
    let b = t2v(&["synth", "--schemas", s(&d.join("schemas.json")), "--n", "30", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 30);
}

#[test]
fn train_predict_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = data_dir();
    let syn = dir.path().join("syn.jsonl");
    let cfg = dir.path().join("cfg.json");
    let model = dir.path().join("model.bin");
    let pred = dir.path().join("pred.jsonl");
    std::fs::write(&cfg, r#"{"d_model": 16, "n_layers": 1, "d_ff": 32, "d_ngram": 8, "d_lstm": 24}"#).unwrap();
    assert_eq!(t2v(&["synth", "--data-dir", s(&d), "--n", "20", "--seed", "2", "--out", s(&syn)]).status.code(), Some(0));
    let train = |out: &Path| {
        stdout_json(&t2v(&["train", "--corpus", s(&syn), "--data-dir", s(&d), "--config", s(&cfg), "--epochs", "3", "--seed", "5", "--out", s(out)]))
    };
    let summary = train(&model);
    assert_eq!(summary["epochs"], 3);
    assert_eq!(summary["steps"], 60);
    let again = dir.path().join("again.bin");
    assert_eq!(train(&again), summary);
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(&again).unwrap());

    let run = t2v(&["predict", "--model", s(&model), "--corpus", s(&syn), "--data-dir", s(&d), "--beam", "4", "--k", "3", "--out", s(&pred)]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let preds = std::fs::read_to_string(&pred).unwrap();
    assert_eq!(preds.lines().count(), 20);
    for line in preds.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        let n = v["candidates"].as_array().unwrap().len();
        assert!((1..=3).contains(&n));
    }
    let eval = t2v(&["eval", "--gold", s(&syn), "--pred", s(&pred), "--data-dir", s(&d)]);
    assert_eq!(eval.status.code(), Some(0));
    assert_eq!(t2v(&["predict", "--model", s(&model), "--corpus", s(&syn), "--data-dir", s(&d), "--beam", "2", "--k", "3"]).status.code(), Some(2));
}

#[test]
fn serve_refuses_to_start_without_a_model() {
    let run = t2v(&["serve", "--model", "/nonexistent.bin", "--data-dir", s(&data_dir()), "--port", "0"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("loading model"));
}
