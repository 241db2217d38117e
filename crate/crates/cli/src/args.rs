use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use t2v_core::dataset::SplitMode;

#[derive(Debug, Parser)]
#[command(name = "t2v", version, about = "Chinese questions to VQL and Vega-Lite charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Where schemas come from: `--schemas` wins over `<data-dir>/schemas.json`.
#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Directory holding schemas.json and <db_id>/<table>.csv.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Schema file.
    #[arg(long)]
    pub schemas: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse VQL and print its syntax tree as JSON.
    Parse {
        vql: String,
        /// Canonicalize against this database's schema.
        #[arg(long)]
        db: Option<String>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Evaluate VQL against a database and print the Vega-Lite spec.
    Compile {
        vql: String,
        #[arg(long)]
        db: String,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition a corpus into train, dev and test files.
    Split {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// question, query or database.
        #[arg(long)]
        mode: SplitMode,
        /// Train, dev and test shares.
        #[arg(long, default_value = "0.7,0.15,0.15")]
        ratios: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Corpus statistics as JSON.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model and write a checkpoint.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Training settings as JSON; missing fields take defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        /// Checkpoint path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Beam-search predictions for a corpus as JSONL.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 5)]
        beam: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score predictions against a gold corpus.
    Eval {
        #[arg(long, alias = "corpus")]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve prediction and compilation over HTTP.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Beam width; raised to k when a request asks for more.
        #[arg(long, default_value_t = 10)]
        beam: usize,
        /// Origins allowed to call the API from a browser.
        #[arg(long = "allow-origin", default_values_t = default_origins())]
        allow_origin: Vec<String>,
    },
    /// Generate a templated synthetic corpus.
    Synth {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn default_origins() -> Vec<String> {
    vec!["http://localhost:5173".into(), "http://127.0.0.1:5173".into()]
}
