//! Corpus and schema loading, split regimes and corpus statistics.

mod corpus;
mod schema;
mod split;
mod stats;

pub use corpus::{load_corpus, parse_corpus, write_corpus, Hardness, LineError, LoadMode, Sample};
pub use schema::{
    is_identifier, load_schemas, ColumnDef, DType, DatabaseSchema, ForeignKey, SchemaSet, TableDef,
};
pub use split::{split_corpus, Split, SplitMode, SplitSpec, SPLIT_TOLERANCE};
pub use stats::{corpus_stats, corpus_stats_with, StatsReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("schema {db_id} invalid at {path}: {message}")]
    Validation {
        db_id: String,
        path: String,
        message: String,
    },
    #[error("{} corpus line(s) rejected; first: {}", .0.len(), .0.first().map(|e| e.to_string()).unwrap_or_default())]
    Corpus(Vec<LineError>),
    #[error("bad split spec: {0}")]
    BadSpec(String),
    #[error("infeasible split: group {key:?} holds {size} of {total} samples, more than {limit:.3} of the corpus")]
    InfeasibleSplit {
        key: String,
        size: usize,
        total: usize,
        limit: f64,
    },
    #[error("cannot canonicalize sample {id}: {message}")]
    Canonical { id: String, message: String },
}
