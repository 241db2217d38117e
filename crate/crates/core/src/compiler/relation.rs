use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use super::{CompileError, Timestamp};
use crate::dataset::{DType, DatabaseSchema, TableDef};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Null,
    Number(f64),
    Text(String),
    Time(Timestamp),
}

impl Cell {
    pub fn is_null(&self) -> bool {
        matches!(self, Cell::Null)
    }

    pub fn dtype(&self) -> Option<DType> {
        match self {
            Cell::Null => None,
            Cell::Number(_) => Some(DType::Number),
            Cell::Text(_) => Some(DType::Text),
            Cell::Time(_) => Some(DType::Time),
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(n) => Some(*n),
            _ => None,
        }
    }

    /// Parse a CSV field; the empty field is null.
    pub fn parse(text: &str, dtype: DType) -> Option<Cell> {
        if text.is_empty() {
            return Some(Cell::Null);
        }
        match dtype {
            DType::Text => Some(Cell::Text(text.to_string())),
            DType::Number => text.trim().parse::<f64>().ok().filter(|n| n.is_finite()).map(Cell::Number),
            DType::Time => Timestamp::parse(text).map(Cell::Time),
        }
    }

    /// Total order: null first, then numbers, text and times; -0 equals 0.
    pub fn total_cmp(&self, other: &Cell) -> Ordering {
        fn rank(c: &Cell) -> u8 {
            match c {
                Cell::Null => 0,
                Cell::Number(_) => 1,
                Cell::Text(_) => 2,
                Cell::Time(_) => 3,
            }
        }
        match (self, other) {
            (Cell::Number(a), Cell::Number(b)) if a == b => Ordering::Equal,
            (Cell::Number(a), Cell::Number(b)) => a.total_cmp(b),
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            (Cell::Time(a), Cell::Time(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Null => f.write_str("NULL"),
            Cell::Number(n) => write!(f, "{}", if *n == 0.0 { 0.0 } else { *n }),
            Cell::Text(s) => f.write_str(s),
            Cell::Time(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Relation {
    pub columns: Vec<(String, DType)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Relation {
    pub fn new(columns: Vec<(String, DType)>) -> Self {
        Relation {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn empty_for(table: &TableDef) -> Self {
        Relation::new(
            table
                .columns
                .iter()
                .map(|c| (c.name.to_ascii_lowercase(), c.dtype))
                .collect(),
        )
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|(n, _)| n.eq_ignore_ascii_case(name))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Check row arity and cell types against the header.
    pub fn validate(&self) -> Result<(), CompileError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(CompileError::Type(format!(
                    "row {i} has {} cells, header has {}",
                    row.len(),
                    self.columns.len()
                )));
            }
            for (cell, (name, dtype)) in row.iter().zip(&self.columns) {
                if let Some(t) = cell.dtype() {
                    if t != *dtype {
                        return Err(CompileError::Type(format!(
                            "row {i} column {name}: {t:?} cell in {dtype:?} column"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Tables of one database, keyed by lowercase table name.
pub type Database = BTreeMap<String, Relation>;

/// Read one table's CSV. The header must name every schema column (in any
/// order, case-insensitively); extra columns are ignored.
pub fn load_table(path: &Path, table: &TableDef) -> Result<Relation, CompileError> {
    let display = path.display().to_string();
    let io_err = |message: String| CompileError::Io {
        path: display.clone(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| io_err(e.to_string()))?;
    let header = reader.headers().map_err(|e| io_err(e.to_string()))?.clone();
    let mut positions = Vec::with_capacity(table.columns.len());
    for col in &table.columns {
        let pos = header
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(&col.name))
            .ok_or_else(|| io_err(format!("header lacks column {}", col.name)))?;
        positions.push(pos);
    }
    let mut rel = Relation::empty_for(table);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| io_err(e.to_string()))?;
        let mut row = Vec::with_capacity(positions.len());
        for (col, &pos) in table.columns.iter().zip(&positions) {
            let field = record.get(pos).unwrap_or("");
            let cell = Cell::parse(field, col.dtype).ok_or_else(|| {
                io_err(format!(
                    "record {}: {:?} is not a valid {:?} for column {}",
                    i + 1,
                    field,
                    col.dtype,
                    col.name
                ))
            })?;
            row.push(cell);
        }
        rel.rows.push(row);
    }
    Ok(rel)
}

/// Load `<dir>/<table>.csv` for every table of the schema. A missing file
/// yields an empty relation.
pub fn load_database(dir: &Path, schema: &DatabaseSchema) -> Result<Database, CompileError> {
    let mut db = Database::new();
    for table in &schema.tables {
        let path = find_csv(dir, &table.name);
        let rel = match path {
            Some(p) => load_table(&p, table)?,
            None => Relation::empty_for(table),
        };
        db.insert(table.name.to_ascii_lowercase(), rel);
    }
    Ok(db)
}

fn find_csv(dir: &Path, table: &str) -> Option<std::path::PathBuf> {
    let exact = dir.join(format!("{table}.csv"));
    if exact.is_file() {
        return Some(exact);
    }
    let want = format!("{}.csv", table.to_ascii_lowercase());
    std::fs::read_dir(dir)
        .ok()?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .find(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.to_ascii_lowercase() == want)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ColumnDef;

    fn table() -> TableDef {
        TableDef {
            name: "Movies".into(),
            columns: vec![
                ColumnDef { name: "name".into(), dtype: DType::Text },
                ColumnDef { name: "stars".into(), dtype: DType::Number },
                ColumnDef { name: "released".into(), dtype: DType::Time },
            ],
            primary_key: None,
            foreign_keys: vec![],
        }
    }

    #[test]
    fn csv_columns_are_reordered_and_typed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("movies.csv");
        std::fs::write(&path, "stars,released,name\n4.5,2020-01-02,\"A, B\"\n,,x\n").unwrap();
        let rel = load_database(dir.path(), &DatabaseSchema { db_id: "d".into(), tables: vec![table()] })
            .unwrap()
            .remove("movies")
            .unwrap();
        assert_eq!(rel.columns[0].0, "name");
        assert_eq!(rel.rows[0][0], Cell::Text("A, B".into()));
        assert_eq!(rel.rows[0][1], Cell::Number(4.5));
        assert_eq!(rel.rows[1][1], Cell::Null);
        assert_eq!(rel.rows[1][2], Cell::Null);
        rel.validate().unwrap();
    }

    #[test]
    fn bad_number_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("Movies.csv");
        std::fs::write(&path, "name,stars,released\na,lots,2020-01-01\n").unwrap();
        assert!(matches!(load_table(&path, &table()), Err(CompileError::Io { .. })));
    }

    #[test]
    fn missing_file_is_empty_table() {
        let dir = tempfile::tempdir().unwrap();
        let db = load_database(dir.path(), &DatabaseSchema { db_id: "d".into(), tables: vec![table()] }).unwrap();
        assert!(db["movies"].is_empty());
        assert_eq!(db["movies"].columns.len(), 3);
    }
}
