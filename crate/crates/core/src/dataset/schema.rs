use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DType {
    Text,
    Number,
    Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    #[serde(rename = "type")]
    pub dtype: DType,
}

/// `(local column, foreign table, foreign column)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignKey(pub String, pub String, pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDef {
    pub name: String,
    pub columns: Vec<ColumnDef>,
    #[serde(default)]
    pub primary_key: Option<String>,
    #[serde(default)]
    pub foreign_keys: Vec<ForeignKey>,
}

impl TableDef {
    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        self.columns
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatabaseSchema {
    pub db_id: String,
    pub tables: Vec<TableDef>,
}

impl DatabaseSchema {
    pub fn table(&self, name: &str) -> Option<&TableDef> {
        self.tables.iter().find(|t| t.name.eq_ignore_ascii_case(name))
    }

    /// Type of `table.column`, if both exist.
    pub fn dtype(&self, table: &str, column: &str) -> Option<DType> {
        self.table(table)?.column(column).map(|c| c.dtype)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |path: String, msg: String| DatasetError::Validation {
            db_id: self.db_id.clone(),
            path,
            message: msg,
        };
        for (ti, table) in self.tables.iter().enumerate() {
            let tpath = format!("tables[{ti}]");
            if !is_identifier(&table.name) {
                return Err(fail(format!("{tpath}.name"), format!("bad identifier {:?}", table.name)));
            }
            if self.tables[..ti]
                .iter()
                .any(|t| t.name.eq_ignore_ascii_case(&table.name))
            {
                return Err(fail(format!("{tpath}.name"), format!("duplicate table {}", table.name)));
            }
            for (ci, col) in table.columns.iter().enumerate() {
                let cpath = format!("{tpath}.columns[{ci}].name");
                if !is_identifier(&col.name) {
                    return Err(fail(cpath, format!("bad identifier {:?}", col.name)));
                }
                if table.columns[..ci]
                    .iter()
                    .any(|c| c.name.eq_ignore_ascii_case(&col.name))
                {
                    return Err(fail(cpath, format!("duplicate column {}", col.name)));
                }
            }
            if let Some(pk) = &table.primary_key {
                if table.column(pk).is_none() {
                    return Err(fail(
                        format!("{tpath}.primary_key"),
                        format!("no column {pk} in {}", table.name),
                    ));
                }
            }
            for (fi, ForeignKey(local, ftable, fcol)) in table.foreign_keys.iter().enumerate() {
                let fpath = format!("{tpath}.foreign_keys[{fi}]");
                if table.column(local).is_none() {
                    return Err(fail(fpath, format!("no local column {local} in {}", table.name)));
                }
                if self.dtype(ftable, fcol).is_none() {
                    return Err(fail(fpath, format!("no foreign column {ftable}.{fcol}")));
                }
            }
        }
        Ok(())
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// All loaded schemas keyed by `db_id`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaSet {
    pub databases: BTreeMap<String, DatabaseSchema>,
}

#[derive(Serialize, Deserialize)]
struct SchemaFile {
    databases: Vec<DatabaseSchema>,
}

impl SchemaSet {
    pub fn get(&self, db_id: &str) -> Option<&DatabaseSchema> {
        self.databases.get(db_id)
    }

    pub fn len(&self) -> usize {
        self.databases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.databases.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DatabaseSchema> {
        self.databases.values()
    }

    pub fn from_schemas(schemas: Vec<DatabaseSchema>) -> Result<Self, DatasetError> {
        let mut databases = BTreeMap::new();
        for schema in schemas {
            schema.validate()?;
            if databases.contains_key(&schema.db_id) {
                return Err(DatasetError::Validation {
                    db_id: schema.db_id.clone(),
                    path: "db_id".into(),
                    message: "duplicate db_id".into(),
                });
            }
            databases.insert(schema.db_id.clone(), schema);
        }
        Ok(SchemaSet { databases })
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        if text.trim().is_empty() {
            return Ok(SchemaSet::default());
        }
        let file: SchemaFile = serde_json::from_str(text).map_err(|e| DatasetError::Validation {
            db_id: String::new(),
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Self::from_schemas(file.databases)
    }

    pub fn to_json(&self) -> String {
        let file = SchemaFile {
            databases: self.databases.values().cloned().collect(),
        };
        serde_json::to_string_pretty(&file).expect("schemas serialize")
    }
}

/// Load a schemas JSON file into a map keyed by `db_id`.
pub fn load_schemas(path: impl AsRef<Path>) -> Result<SchemaSet, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    SchemaSet::from_json(&text)
}
