//! Tree-matching, top-k and per-component accuracy plus the error taxonomy.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatabaseSchema, Hardness, Sample, SchemaSet};
use crate::exec::Exec;
use crate::vql::{canonicalize, compare_canonical, parse_vql, ChartType, ComponentReport, VqlQuery};

pub const TOP_K: [usize; 3] = [1, 3, 5];

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("prediction for unknown sample id {0}")]
    UnknownSampleId(String),
    #[error("more than one prediction for sample id {0}")]
    DuplicateSampleId(String),
    #[error("prediction for {0} has no candidates")]
    NoCandidates(String),
    #[error("gold sample {id} does not resolve: {message}")]
    BadGold { id: String, message: String },
    #[error("predictions line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub candidates: Vec<String>,
}

/// Which parts of a failed prediction were wrong. Parts are independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorSet {
    pub vis_part: bool,
    pub axis_part: bool,
    pub data_part: bool,
}

impl ErrorSet {
    pub const ALL: ErrorSet = ErrorSet {
        vis_part: true,
        axis_part: true,
        data_part: true,
    };

    pub fn is_empty(&self) -> bool {
        !(self.vis_part || self.axis_part || self.data_part)
    }

    pub fn from_report(r: &ComponentReport) -> Self {
        ErrorSet {
            vis_part: !r.vis_match,
            axis_part: !r.axis_match,
            data_part: !r.data_match.all(),
        }
    }

    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.vis_part {
            out.push("VIS_PART");
        }
        if self.axis_part {
            out.push("AXIS_PART");
        }
        if self.data_part {
            out.push("DATA_PART");
        }
        out
    }
}

/// Classify a failed prediction; `None` (unparseable) and unresolvable
/// predictions carry every flag.
pub fn classify_error(pred: Option<&VqlQuery>, gold: &VqlQuery, schema: &DatabaseSchema) -> ErrorSet {
    let Ok(gold) = canonicalize(gold, schema) else {
        return ErrorSet::ALL;
    };
    match pred.map(|p| canonicalize(p, schema)) {
        Some(Ok(p)) => ErrorSet::from_report(&compare_canonical(&p, &gold)),
        _ => ErrorSet::ALL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl Accuracy {
    fn new(correct: usize, total: usize) -> Self {
        Accuracy {
            correct,
            total,
            accuracy: if total == 0 {
                0.0
            } else {
                correct as f64 / total as f64
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TreeAccuracy {
    pub per_hardness: BTreeMap<Hardness, Accuracy>,
    pub overall: Accuracy,
}

/// One row of the component table; every column is an accuracy over the
/// row's samples, scored on the top-1 candidate.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentRow {
    pub samples: usize,
    pub vis: f64,
    pub axis: f64,
    #[serde(rename = "where")]
    pub where_: f64,
    pub join: f64,
    pub group: f64,
    pub binning: f64,
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComponentTable {
    /// Keyed by the gold chart type.
    pub per_chart: BTreeMap<ChartType, ComponentRow>,
    pub overall: ComponentRow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub failures: usize,
    pub vis: usize,
    pub axis: usize,
    pub data: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tree_acc: TreeAccuracy,
    /// Keys `"1"`, `"3"`, `"5"` and `"all"`.
    pub topk_acc: BTreeMap<String, f64>,
    pub component_table: ComponentTable,
    pub error_counts: ErrorCounts,
}

/// Per-sample result of scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub id: String,
    pub hardness: Hardness,
    pub chart: ChartType,
    /// 1-based rank of the first matching candidate.
    pub match_rank: Option<usize>,
    /// Component comparison of the top-1 candidate, if it resolves.
    pub top1: Option<ComponentReport>,
    pub errors: ErrorSet,
}

fn resolve(text: &str, schema: &DatabaseSchema) -> Option<VqlQuery> {
    canonicalize(&parse_vql(text).ok()?, schema).ok()
}

fn score_sample(
    gold: &Sample,
    schema: &DatabaseSchema,
    candidates: &[String],
) -> Result<SampleOutcome, MetricsError> {
    let bad_gold = |message: String| MetricsError::BadGold {
        id: gold.id.clone(),
        message,
    };
    let gold_q = parse_vql(&gold.vql).map_err(|e| bad_gold(e.to_string()))?;
    let gold_q = canonicalize(&gold_q, schema).map_err(|e| bad_gold(e.to_string()))?;
    let resolved: Vec<Option<VqlQuery>> = candidates.iter().map(|c| resolve(c, schema)).collect();
    let match_rank = resolved
        .iter()
        .position(|p| p.as_ref() == Some(&gold_q))
        .map(|i| i + 1);
    let top1 = resolved
        .first()
        .and_then(|p| p.as_ref())
        .map(|p| compare_canonical(p, &gold_q));
    let errors = if match_rank == Some(1) {
        ErrorSet::default()
    } else {
        top1.as_ref().map(ErrorSet::from_report).unwrap_or(ErrorSet::ALL)
    };
    Ok(SampleOutcome {
        id: gold.id.clone(),
        hardness: gold.hardness,
        chart: gold_q.chart,
        match_rank,
        top1,
        errors,
    })
}

/// Score every gold sample. A gold sample without a prediction record counts
/// as a failure with every error flag.
pub fn score_samples(
    preds: &[PredictionRecord],
    gold: &[Sample],
    schemas: &SchemaSet,
    exec: Exec,
) -> Result<Vec<SampleOutcome>, MetricsError> {
    let gold_ids: HashMap<&str, usize> = gold.iter().enumerate().map(|(i, s)| (s.id.as_str(), i)).collect();
    let mut by_id: HashMap<&str, &PredictionRecord> = HashMap::new();
    for p in preds {
        if !gold_ids.contains_key(p.id.as_str()) {
            return Err(MetricsError::UnknownSampleId(p.id.clone()));
        }
        if p.candidates.is_empty() {
            return Err(MetricsError::NoCandidates(p.id.clone()));
        }
        if by_id.insert(p.id.as_str(), p).is_some() {
            return Err(MetricsError::DuplicateSampleId(p.id.clone()));
        }
    }
    let no_candidates: Vec<String> = Vec::new();
    exec.map(gold, |s| {
        let schema = schemas.get(&s.db_id).ok_or_else(|| MetricsError::BadGold {
            id: s.id.clone(),
            message: format!("unknown db_id {}", s.db_id),
        })?;
        let candidates = by_id.get(s.id.as_str()).map(|p| &p.candidates).unwrap_or(&no_candidates);
        score_sample(s, schema, candidates)
    })
    .into_iter()
    .collect()
}

fn component_row(outcomes: &[&SampleOutcome]) -> ComponentRow {
    let n = outcomes.len();
    let frac = |f: &dyn Fn(&ComponentReport) -> bool| {
        if n == 0 {
            0.0
        } else {
            outcomes.iter().filter(|o| o.top1.as_ref().is_some_and(f)).count() as f64 / n as f64
        }
    };
    ComponentRow {
        samples: n,
        vis: frac(&|r| r.vis_match),
        axis: frac(&|r| r.axis_match),
        where_: frac(&|r| r.data_match.where_),
        join: frac(&|r| r.data_match.join),
        group: frac(&|r| r.data_match.group),
        binning: frac(&|r| r.data_match.binning),
        order: frac(&|r| r.data_match.order),
    }
}

pub fn summarize(outcomes: &[SampleOutcome]) -> MetricsReport {
    let total = outcomes.len();
    let hit = |o: &&SampleOutcome, k: usize| o.match_rank.is_some_and(|r| r <= k);

    let mut per_hardness = BTreeMap::new();
    for h in Hardness::ALL {
        let of_h: Vec<&SampleOutcome> = outcomes.iter().filter(|o| o.hardness == h).collect();
        let correct = of_h.iter().filter(|o| hit(o, 1)).count();
        per_hardness.insert(h, Accuracy::new(correct, of_h.len()));
    }
    let top1 = outcomes.iter().filter(|o| hit(o, 1)).count();
    let tree_acc = TreeAccuracy {
        per_hardness,
        overall: Accuracy::new(top1, total),
    };

    let rate = |n: usize| if total == 0 { 0.0 } else { n as f64 / total as f64 };
    let mut topk_acc = BTreeMap::new();
    for k in TOP_K {
        topk_acc.insert(k.to_string(), rate(outcomes.iter().filter(|o| hit(o, k)).count()));
    }
    topk_acc.insert(
        "all".to_string(),
        rate(outcomes.iter().filter(|o| o.match_rank.is_some()).count()),
    );

    let all: Vec<&SampleOutcome> = outcomes.iter().collect();
    let mut per_chart = BTreeMap::new();
    for chart in ChartType::ALL {
        let rows: Vec<&SampleOutcome> = outcomes.iter().filter(|o| o.chart == chart).collect();
        if !rows.is_empty() {
            per_chart.insert(chart, component_row(&rows));
        }
    }

    let failed: Vec<&SampleOutcome> = outcomes.iter().filter(|o| !hit(o, 1)).collect();
    let error_counts = ErrorCounts {
        failures: failed.len(),
        vis: failed.iter().filter(|o| o.errors.vis_part).count(),
        axis: failed.iter().filter(|o| o.errors.axis_part).count(),
        data: failed.iter().filter(|o| o.errors.data_part).count(),
    };

    MetricsReport {
        tree_acc,
        topk_acc,
        component_table: ComponentTable {
            per_chart,
            overall: component_row(&all),
        },
        error_counts,
    }
}

pub fn evaluate(
    preds: &[PredictionRecord],
    gold: &[Sample],
    schemas: &SchemaSet,
) -> Result<MetricsReport, MetricsError> {
    evaluate_with(preds, gold, schemas, Exec::default())
}

pub fn evaluate_with(
    preds: &[PredictionRecord],
    gold: &[Sample],
    schemas: &SchemaSet,
    exec: Exec,
) -> Result<MetricsReport, MetricsError> {
    Ok(summarize(&score_samples(preds, gold, schemas, exec)?))
}

/// Plain-text rendering: tree accuracy by hardness, top-k, component table
/// and error counts.
pub fn format_report(r: &MetricsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Tree matching accuracy");
    let mut header = String::new();
    let mut line = String::new();
    for (h, acc) in &r.tree_acc.per_hardness {
        let _ = write!(header, "{:>12}", h.label());
        let _ = write!(line, "{:>12.3}", acc.accuracy);
    }
    let _ = writeln!(out, "{header}{:>12}", "All");
    let _ = writeln!(out, "{line}{:>12.3}", r.tree_acc.overall.accuracy);
    let _ = writeln!(out);

    let _ = writeln!(out, "Top-k accuracy");
    let keys = ["1", "3", "5", "all"];
    let _ = writeln!(
        out,
        "{}",
        keys.iter()
            .map(|k| format!("{:>8}", if *k == "all" { "All".to_string() } else { format!("Top{k}") }))
            .collect::<String>()
    );
    let _ = writeln!(
        out,
        "{}",
        keys.iter()
            .map(|k| format!("{:>8.3}", r.topk_acc.get(*k).copied().unwrap_or(0.0)))
            .collect::<String>()
    );
    let _ = writeln!(out);

    let _ = writeln!(out, "Component accuracy");
    let _ = writeln!(
        out,
        "{:<10}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}{:>8}",
        "Chart", "N", "Vis", "Axis", "Where", "Join", "Group", "Bin", "Order"
    );
    let rows = r
        .component_table
        .per_chart
        .iter()
        .map(|(c, row)| (c.label(), row))
        .chain(std::iter::once(("All", &r.component_table.overall)));
    for (label, row) in rows {
        let _ = writeln!(
            out,
            "{:<10}{:>8}{:>8.3}{:>8.3}{:>8.3}{:>8.3}{:>8.3}{:>8.3}{:>8.3}",
            label, row.samples, row.vis, row.axis, row.where_, row.join, row.group, row.binning, row.order
        );
    }
    let _ = writeln!(out);

    let e = &r.error_counts;
    let _ = writeln!(out, "Errors over {} failed top-1 samples", e.failures);
    let _ = writeln!(out, "{:>10}{:>10}{:>10}", "Vis", "Axis", "Data");
    let _ = writeln!(out, "{:>10}{:>10}{:>10}", e.vis, e.axis, e.data);
    out
}

pub fn parse_predictions(text: &str) -> Result<Vec<PredictionRecord>, MetricsError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: PredictionRecord = serde_json::from_str(line).map_err(|e| MetricsError::Format {
            line: i + 1,
            message: e.to_string(),
        })?;
        if rec.candidates.is_empty() {
            return Err(MetricsError::NoCandidates(rec.id));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn load_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, MetricsError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| MetricsError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_predictions(&text)
}

pub fn predictions_to_jsonl(preds: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for p in preds {
        out.push_str(&serde_json::to_string(p).expect("record serializes"));
        out.push('\n');
    }
    out
}
