use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use super::{emit_spec, evaluate_query, load_database, CompileError, Database, VegaLiteDoc};
use crate::dataset::{load_schemas, DatasetError, SchemaSet};
use crate::vql::{canonicalize, parse_vql, VqlError, VqlQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Parse,
    Load,
    Canonicalize,
    Evaluate,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Parse => "parse",
            Stage::Load => "load",
            Stage::Canonicalize => "canonicalize",
            Stage::Evaluate => "evaluate",
        })
    }
}

#[derive(Debug, Error)]
pub enum Cause {
    #[error(transparent)]
    Vql(#[from] VqlError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Debug, Error)]
#[error("{stage}: {cause}")]
pub struct PipelineError {
    pub stage: Stage,
    pub cause: Cause,
}

impl PipelineError {
    fn at(stage: Stage, cause: impl Into<Cause>) -> Self {
        PipelineError {
            stage,
            cause: cause.into(),
        }
    }

    /// Short error class, e.g. `SyntaxError` or `MissingDatabase`.
    pub fn kind(&self) -> &'static str {
        match &self.cause {
            Cause::Vql(VqlError::Syntax { .. }) => "SyntaxError",
            Cause::Vql(VqlError::Semantic(_)) => "SemanticError",
            Cause::Vql(VqlError::Resolution(_)) => "ResolutionError",
            Cause::Compile(CompileError::Type(_)) => "TypeError",
            Cause::Compile(CompileError::MissingTable(_)) => "MissingTable",
            Cause::Compile(CompileError::MissingColumn(_)) => "MissingColumn",
            Cause::Compile(CompileError::MissingDatabase(_)) => "MissingDatabase",
            Cause::Compile(CompileError::Io { .. }) | Cause::Dataset(_) => "IoError",
        }
    }
}

/// Schemas plus lazily loaded table data under one directory laid out as
/// `schemas.json` and `<db_id>/<table>.csv`.
#[derive(Debug)]
pub struct DataStore {
    dir: PathBuf,
    schemas: SchemaSet,
    loaded: Mutex<HashMap<String, Arc<Database>>>,
}

impl DataStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let dir = dir.as_ref().to_path_buf();
        let schemas = load_schemas(dir.join("schemas.json"))?;
        Ok(Self::with_schemas(dir, schemas))
    }

    pub fn with_schemas(dir: impl AsRef<Path>, schemas: SchemaSet) -> Self {
        DataStore {
            dir: dir.as_ref().to_path_buf(),
            schemas,
            loaded: Mutex::new(HashMap::new()),
        }
    }

    pub fn schemas(&self) -> &SchemaSet {
        &self.schemas
    }

    pub fn database(&self, db_id: &str) -> Result<Arc<Database>, CompileError> {
        if let Some(db) = self.loaded.lock().expect("cache lock").get(db_id) {
            return Ok(db.clone());
        }
        let schema = self
            .schemas
            .get(db_id)
            .ok_or_else(|| CompileError::MissingDatabase(db_id.to_string()))?;
        let db = Arc::new(load_database(&self.dir.join(db_id), schema)?);
        self.loaded
            .lock()
            .expect("cache lock")
            .insert(db_id.to_string(), db.clone());
        Ok(db)
    }

    /// Parse, resolve, evaluate and emit, tagging failures with their stage.
    pub fn render(&self, vql_text: &str, db_id: &str) -> Result<VegaLiteDoc, PipelineError> {
        let q = parse_vql(vql_text).map_err(|e| PipelineError::at(Stage::Parse, e))?;
        self.render_query(&q, db_id)
    }

    pub fn render_query(&self, q: &VqlQuery, db_id: &str) -> Result<VegaLiteDoc, PipelineError> {
        let db = self
            .database(db_id)
            .map_err(|e| PipelineError::at(Stage::Load, e))?;
        let schema = self.schemas.get(db_id).expect("loaded database has a schema");
        let q = canonicalize(q, schema).map_err(|e| PipelineError::at(Stage::Canonicalize, e))?;
        let result = evaluate_query(&q, &db).map_err(|e| PipelineError::at(Stage::Evaluate, e))?;
        Ok(emit_spec(&q, &result))
    }
}

/// One-shot render reading `schemas.json` and CSVs from `data_dir`.
pub fn render_pipeline(
    vql_text: &str,
    db_id: &str,
    data_dir: impl AsRef<Path>,
) -> Result<VegaLiteDoc, PipelineError> {
    let q = parse_vql(vql_text).map_err(|e| PipelineError::at(Stage::Parse, e))?;
    let store = DataStore::open(data_dir).map_err(|e| PipelineError::at(Stage::Load, e))?;
    store.render_query(&q, db_id)
}
