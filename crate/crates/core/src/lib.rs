//! Chinese text-to-visualization toolkit: VQL language, dataset handling,
//! query execution to Vega-Lite, n-gram lexicon and evaluation metrics.

pub mod compiler;
pub mod dataset;
pub mod exec;
pub mod metrics;
pub mod ngram;
pub mod vql;

pub use exec::Exec;
