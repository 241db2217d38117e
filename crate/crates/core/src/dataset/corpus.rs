use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DatasetError, SchemaSet};
use crate::vql::{canonicalize, parse_vql};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hardness {
    Easy,
    Medium,
    Hard,
    ExtraHard,
}

impl Hardness {
    pub const ALL: [Hardness; 4] = [
        Hardness::Easy,
        Hardness::Medium,
        Hardness::Hard,
        Hardness::ExtraHard,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Hardness::Easy => "Easy",
            Hardness::Medium => "Medium",
            Hardness::Hard => "Hard",
            Hardness::ExtraHard => "Extra Hard",
        }
    }
}

/// One question/query pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub db_id: String,
    pub question_zh: String,
    pub vql: String,
    pub hardness: Hardness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number.
    pub line: usize,
    pub cause: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.cause)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadMode {
    /// Stop at the first bad line.
    Strict,
    /// Check every line and report all problems together.
    #[default]
    Collect,
}

fn check_line(text: &str, schemas: &SchemaSet) -> Result<Sample, String> {
    let sample: Sample = serde_json::from_str(text).map_err(|e| format!("bad record: {e}"))?;
    if sample.question_zh.trim().is_empty() {
        return Err("empty question_zh".into());
    }
    let schema = schemas
        .get(&sample.db_id)
        .ok_or_else(|| format!("unknown db_id {}", sample.db_id))?;
    let query = parse_vql(&sample.vql).map_err(|e| format!("vql: {e}"))?;
    canonicalize(&query, schema).map_err(|e| format!("vql: {e}"))?;
    Ok(sample)
}

/// Parse and validate JSONL corpus text; blank lines are skipped.
pub fn parse_corpus(
    text: &str,
    schemas: &SchemaSet,
    mode: LoadMode,
) -> Result<Vec<Sample>, DatasetError> {
    let mut samples = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match check_line(line, schemas) {
            Ok(s) => samples.push(s),
            Err(cause) => {
                errors.push(LineError { line: i + 1, cause });
                if mode == LoadMode::Strict {
                    break;
                }
            }
        }
    }
    if errors.is_empty() {
        Ok(samples)
    } else {
        Err(DatasetError::Corpus(errors))
    }
}

pub fn load_corpus(
    path: impl AsRef<Path>,
    schemas: &SchemaSet,
    mode: LoadMode,
) -> Result<Vec<Sample>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_corpus(&text, schemas, mode)
}

pub fn write_corpus(path: impl AsRef<Path>, samples: &[Sample]) -> Result<(), DatasetError> {
    let path = path.as_ref();
    let io_err = |e: std::io::Error| DatasetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    for s in samples {
        let line = serde_json::to_string(s).expect("sample serializes");
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schemas() -> SchemaSet {
        SchemaSet::from_json(
            r#"{"databases": [{"db_id": "cinema", "tables": [{"name": "movies", "columns": [
                {"name": "name", "type": "text"}, {"name": "stars", "type": "number"}]}]}]}"#,
        )
        .unwrap()
    }

    fn line(id: &str, vql: &str) -> String {
        format!(
            r#"{{"id": "{id}", "db_id": "cinema", "question_zh": "电影数量", "vql": "{vql}", "hardness": "easy"}}"#
        )
    }

    #[test]
    fn loads_valid_lines_in_order() {
        let good = "Visualize BAR SELECT name , COUNT(name) FROM movies GROUP BY name";
        let text = [line("a", good), line("b", good), String::new(), line("c", good)].join("\n");
        let samples = parse_corpus(&text, &schemas(), LoadMode::Strict).unwrap();
        let ids: Vec<&str> = samples.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(samples[0].hardness, Hardness::Easy);
    }

    #[test]
    fn malformed_vql_names_line_and_expected_set() {
        let good = "Visualize BAR SELECT name , COUNT(name) FROM movies GROUP BY name";
        let text = [line("a", good), line("b", "Visualize BAR SELECT name name FROM movies")].join("\n");
        match parse_corpus(&text, &schemas(), LoadMode::Collect).unwrap_err() {
            DatasetError::Corpus(errs) => {
                assert_eq!(errs.len(), 1);
                assert_eq!(errs[0].line, 2);
                assert!(errs[0].cause.contains("expected one of"), "{}", errs[0].cause);
                assert!(errs[0].cause.contains(','), "{}", errs[0].cause);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strict_stops_at_first_error_collect_reports_all() {
        let bad = line("x", "nonsense");
        let text = [bad.clone(), bad.clone(), bad].join("\n");
        let count = |mode| match parse_corpus(&text, &schemas(), mode) {
            Err(DatasetError::Corpus(errs)) => errs.len(),
            _ => 0,
        };
        assert_eq!(count(LoadMode::Strict), 1);
        assert_eq!(count(LoadMode::Collect), 3);
    }

    #[test]
    fn unknown_database_is_rejected() {
        let text = line("a", "Visualize BAR SELECT name , stars FROM movies").replace("cinema", "nowhere");
        assert!(parse_corpus(&text, &schemas(), LoadMode::Strict).is_err());
    }
}
