use std::net::{IpAddr, SocketAddr};
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use t2v_core::compiler::DataStore;
use t2v_core::dataset::{
    corpus_stats, load_corpus, load_schemas, split_corpus, write_corpus, LoadMode, Sample, SchemaSet, SplitSpec,
};
use t2v_core::metrics::{evaluate, format_report, load_predictions, predictions_to_jsonl};
use t2v_core::vql::{canonicalize, parse_vql};
use t2v_core::Exec;
use t2v_neural::{checkpoint, generate_synthetic_corpus, predict_samples, train_with, TrainConfig};

use crate::args::{Cli, Command, DataArgs};
use crate::server::{self, AppState};

/// A malformed invocation that clap cannot catch on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

impl DataArgs {
    fn schema_path(&self) -> Result<PathBuf> {
        match (&self.schemas, &self.data_dir) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(dir)) => Ok(dir.join("schemas.json")),
            (None, None) => Err(usage("one of --schemas or --data-dir is required")),
        }
    }

    fn load(&self) -> Result<SchemaSet> {
        let path = self.schema_path()?;
        load_schemas(&path).with_context(|| format!("loading schemas from {}", path.display()))
    }
}

fn corpus(path: &Path, schemas: &SchemaSet) -> Result<Vec<Sample>> {
    load_corpus(path, schemas, LoadMode::Collect).with_context(|| format!("loading corpus {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(value: &impl Serialize, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(&text, out)
}

fn parse_ratios(text: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| usage(format!("--ratios {text:?}: {e}")))?;
    parts.try_into().map_err(|_| usage(format!("--ratios needs three values, got {text:?}")))
}

fn train_config(path: Option<&Path>, seed: Option<u64>, epochs: Option<usize>) -> Result<TrainConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => TrainConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(e) = epochs {
        cfg.epochs = e;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct SplitSummary<'a> {
    mode: &'a str,
    seed: u64,
    train: usize,
    dev: usize,
    test: usize,
}

#[derive(Serialize)]
struct TrainSummary {
    epochs: usize,
    steps: usize,
    final_loss: Option<f64>,
    parameters: usize,
    vocab: usize,
    lexicon: usize,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Parse { vql, db, data } => {
            let q = parse_vql(&vql)?;
            let q = match db {
                Some(db) => {
                    let schemas = data.load()?;
                    let schema = schemas.get(&db).with_context(|| format!("unknown database {db}"))?;
                    canonicalize(&q, schema)?
                }
                None => q,
            };
            emit_json(&q, None)
        }
        Command::Compile { vql, db, data_dir, out } => {
            let store = DataStore::open(&data_dir).with_context(|| format!("opening {}", data_dir.display()))?;
            match store.render(&vql, &db) {
                Ok(doc) => emit(&doc.to_json_string(), out.as_deref()),
                Err(e) => {
                    let detail = serde_json::json!({"stage": e.stage, "kind": e.kind(), "message": e.cause.to_string()});
                    bail!("{detail}")
                }
            }
        }
        Command::Split { corpus: path, data, mode, ratios, seed, out } => {
            let schemas = data.load()?;
            let samples = corpus(&path, &schemas)?;
            let spec = SplitSpec { mode, ratios: parse_ratios(&ratios)?, seed };
            let split = split_corpus(&samples, &schemas, &spec)?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (name, part) in ["train", "dev", "test"].iter().zip(split.parts()) {
                write_corpus(out.join(format!("{name}.jsonl")), part)?;
            }
            let mode = serde_json::to_value(mode)?;
            emit_json(
                &SplitSummary {
                    mode: mode.as_str().unwrap_or_default(),
                    seed,
                    train: split.train.len(),
                    dev: split.dev.len(),
                    test: split.test.len(),
                },
                None,
            )
        }
        Command::Stats { corpus: path, data, out } => {
            let schemas = data.load()?;
            let samples = corpus(&path, &schemas)?;
            emit_json(&corpus_stats(&samples, &schemas), out.as_deref())
        }
        Command::Train { corpus: path, data, config, seed, epochs, out } => {
            let schemas = data.load()?;
            let samples = corpus(&path, &schemas)?;
            let cfg = train_config(config.as_deref(), seed, epochs)?;
            let (model, report) = train_with(&samples, &schemas, &cfg, |epoch, loss, _| {
                eprintln!("epoch {:>4}  loss {loss:.5}", epoch + 1);
                ControlFlow::Continue(())
            })?;
            checkpoint::save(&model, &out)?;
            emit_json(
                &TrainSummary {
                    epochs: report.epoch_losses.len(),
                    steps: report.steps,
                    final_loss: report.final_loss(),
                    parameters: model.params().scalar_count(),
                    vocab: model.vocab().len(),
                    lexicon: model.lexicon().len(),
                },
                None,
            )
        }
        Command::Predict { model, corpus: path, data, beam, k, out } => {
            if k == 0 || beam == 0 || k > beam {
                return Err(usage(format!("need 1 <= --k <= --beam, got k={k} beam={beam}")));
            }
            let schemas = data.load()?;
            let samples = corpus(&path, &schemas)?;
            let model = checkpoint::load(&model)?;
            let preds = predict_samples(&model, &samples, &schemas, beam, k, Exec::default())?;
            emit(&predictions_to_jsonl(&preds), out.as_deref())
        }
        Command::Eval { gold, pred, data, out } => {
            let schemas = data.load()?;
            let gold = corpus(&gold, &schemas)?;
            let preds = load_predictions(&pred)?;
            let report = evaluate(&preds, &gold, &schemas)?;
            if let Some(out) = out {
                emit_json(&report, Some(&out))?;
            }
            emit(&format_report(&report), None)
        }
        Command::Serve { model, data_dir, port, host, beam, allow_origin } => {
            let ip: IpAddr = host.parse().map_err(|e| usage(format!("--host {host:?}: {e}")))?;
            let state = AppState::load(&model, &data_dir, beam)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(state, SocketAddr::new(ip, port), &allow_origin))
        }
        Command::Synth { data, n, seed, out } => {
            let schemas = data.load()?;
            let samples = generate_synthetic_corpus(&schemas, n, seed);
            match out {
                Some(path) => Ok(write_corpus(&path, &samples)?),
                None => {
                    let lines: String = samples
                        .iter()
                        .map(|s| serde_json::to_string(s).map(|l| l + "\n"))
                        .collect::<std::result::Result<_, _>>()?;
                    emit(&lines, None)
                }
            }
        }
    }
}

/// Exit status for a finished run: 0 on success, 2 for usage errors and 1
/// for everything else.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => 2,
        Err(_) => 1,
    }
}
