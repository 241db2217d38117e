use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Hardness, Sample, SchemaSet};
use crate::exec::Exec;
use crate::vql::{canonical_string, parse_vql, unparse_vql};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub total: usize,
    pub per_hardness: BTreeMap<Hardness, usize>,
    pub per_db: BTreeMap<String, usize>,
    pub distinct_vql: usize,
    /// Question length in characters → number of questions.
    pub question_length_histogram: BTreeMap<usize, usize>,
}

impl Default for StatsReport {
    fn default() -> Self {
        StatsReport {
            total: 0,
            per_hardness: Hardness::ALL.iter().map(|h| (*h, 0)).collect(),
            per_db: BTreeMap::new(),
            distinct_vql: 0,
            question_length_histogram: BTreeMap::new(),
        }
    }
}

/// Identity of a sample's query: its canonical string, or the plain unparse
/// when the query does not resolve, or the raw text when it does not parse.
fn query_identity(s: &Sample, schemas: &SchemaSet) -> String {
    let Ok(q) = parse_vql(&s.vql) else {
        return s.vql.clone();
    };
    let canonical = schemas
        .get(&s.db_id)
        .and_then(|schema| canonical_string(&q, schema).ok());
    let text = canonical.unwrap_or_else(|| unparse_vql(&q));
    format!("{}\u{1f}{}", s.db_id, text)
}

pub fn corpus_stats(samples: &[Sample], schemas: &SchemaSet) -> StatsReport {
    corpus_stats_with(samples, schemas, Exec::default())
}

pub fn corpus_stats_with(samples: &[Sample], schemas: &SchemaSet, exec: Exec) -> StatsReport {
    let mut report = StatsReport {
        total: samples.len(),
        ..StatsReport::default()
    };
    for s in samples {
        *report.per_hardness.entry(s.hardness).or_default() += 1;
        *report.per_db.entry(s.db_id.clone()).or_default() += 1;
        *report
            .question_length_histogram
            .entry(s.question_zh.chars().count())
            .or_default() += 1;
    }
    let identities: BTreeSet<String> = exec
        .map(samples, |s| query_identity(s, schemas))
        .into_iter()
        .collect();
    report.distinct_vql = identities.len();
    report
}
