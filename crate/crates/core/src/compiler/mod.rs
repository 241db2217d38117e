//! Executes resolved queries over in-memory tables and emits Vega-Lite.

mod evaluate;
mod pipeline;
mod relation;
mod time;
mod vegalite;

pub use evaluate::{bin_value, evaluate_all, evaluate_query, like_match, output_fields};
pub use pipeline::{render_pipeline, Cause, DataStore, PipelineError, Stage};
pub use relation::{load_database, load_table, Cell, Database, Relation};
pub use time::{days_in_month, Timestamp, WEEKDAYS};
pub use vegalite::{cell_to_json, emit_spec, VegaLiteDoc, VEGA_LITE_SCHEMA};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("type error: {0}")]
    Type(String),
    #[error("missing table {0}")]
    MissingTable(String),
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error("missing database {0}")]
    MissingDatabase(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}
