//! Schema-aware normal form for VQL queries.
//!
//! Two queries are tree-equal exactly when their canonical forms are
//! structurally equal, so every ordering here must be total and independent
//! of how the input happened to be written.

use super::ast::*;
use super::error::VqlError;
use super::parser::validate_with;
use super::unparse;
use crate::dataset::{DType, DatabaseSchema};

/// Resolves column references against the tables a query reads.
struct Resolver<'a> {
    schema: &'a DatabaseSchema,
    /// Canonical (lower-case) names of the FROM and JOIN tables.
    tables: Vec<String>,
}

impl<'a> Resolver<'a> {
    fn new(q: &VqlQuery, schema: &'a DatabaseSchema) -> Result<Self, VqlError> {
        let mut tables = Vec::new();
        for name in q.tables() {
            let def = schema.table(name).ok_or_else(|| {
                VqlError::resolution(format!("no table {name} in database {}", schema.db_id))
            })?;
            let lc = def.name.to_ascii_lowercase();
            if tables.contains(&lc) {
                return Err(VqlError::resolution(format!("table {name} appears twice")));
            }
            tables.push(lc);
        }
        Ok(Resolver { schema, tables })
    }

    fn resolve(&self, c: &ColumnRef) -> Result<ColumnRef, VqlError> {
        let column = c.column.to_ascii_lowercase();
        match &c.table {
            Some(t) => {
                let t = t.to_ascii_lowercase();
                if !self.tables.contains(&t) {
                    return Err(VqlError::resolution(format!(
                        "{c} refers to table {t}, which the query does not read"
                    )));
                }
                if self.schema.dtype(&t, &column).is_none() {
                    return Err(VqlError::resolution(format!("no column {c}")));
                }
                Ok(ColumnRef::qualified(t, column))
            }
            None => {
                let hits: Vec<&String> = self
                    .tables
                    .iter()
                    .filter(|t| self.schema.dtype(t, &column).is_some())
                    .collect();
                match hits.as_slice() {
                    [t] => Ok(ColumnRef::qualified((*t).clone(), column)),
                    [] => Err(VqlError::resolution(format!("no column {c} in {}", self.tables.join(", ")))),
                    _ => Err(VqlError::resolution(format!(
                        "column {c} is ambiguous between {}",
                        hits.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" and ")
                    ))),
                }
            }
        }
    }

    fn dtype(&self, resolved: &ColumnRef) -> DType {
        self.schema
            .dtype(resolved.table.as_deref().unwrap_or_default(), &resolved.column)
            .expect("resolved column exists")
    }
}

fn normalize_literal(lit: &Literal) -> Literal {
    match lit {
        Literal::Number(n) if *n == 0.0 => Literal::Number(0.0),
        other => other.clone(),
    }
}

/// Column-then-operator-then-text ordering for WHERE conjuncts.
fn predicate_key(p: &Predicate) -> (String, &'static str, String) {
    (p.column.to_string(), p.cond.op_name(), unparse::predicate(p))
}

/// Deterministic normal form: identifiers lower-cased and table-qualified,
/// conjuncts and GROUP BY sorted and deduplicated, joins sorted by table with
/// keys oriented smaller side first.
pub fn canonicalize(q: &VqlQuery, schema: &DatabaseSchema) -> Result<VqlQuery, VqlError> {
    let r = Resolver::new(q, schema)?;

    let x = r.resolve(&q.x)?;
    let y = YChannel {
        agg: q.y.agg,
        arg: match &q.y.arg {
            YArg::Star => YArg::Star,
            YArg::Column(c) => YArg::Column(r.resolve(c)?),
        },
    };
    if let (AggFn::Sum | AggFn::Avg, YArg::Column(c)) = (&y.agg, &y.arg) {
        if r.dtype(c) != DType::Number {
            return Err(VqlError::semantic(format!(
                "{} needs a numeric column, {c} is {:?}",
                y.agg.keyword().unwrap_or_default(),
                r.dtype(c)
            )));
        }
    }
    let color = q.color.as_ref().map(|c| r.resolve(c)).transpose()?;

    let mut joins = Vec::with_capacity(q.joins.len());
    for j in &q.joins {
        let table = j.table.to_ascii_lowercase();
        let a = r.resolve(&j.left)?;
        let b = r.resolve(&j.right)?;
        let a_in = a.table.as_deref() == Some(table.as_str());
        let b_in = b.table.as_deref() == Some(table.as_str());
        if a_in == b_in {
            return Err(VqlError::resolution(format!(
                "JOIN {table} must relate one column of {table} to another table"
            )));
        }
        let (left, right) = if a.to_string() <= b.to_string() { (a, b) } else { (b, a) };
        joins.push(Join { table, left, right });
    }
    joins.sort_by_cached_key(|j| (j.table.clone(), unparse::join(j)));

    let mut filters = Vec::with_capacity(q.filters.len());
    for p in &q.filters {
        let column = r.resolve(&p.column)?;
        let cond = match &p.cond {
            Condition::Compare { op, value } => Condition::Compare {
                op: *op,
                value: normalize_literal(value),
            },
            Condition::Between { low, high } => Condition::Between {
                low: normalize_literal(low),
                high: normalize_literal(high),
            },
            Condition::In { values } => {
                let mut values: Vec<Literal> = values.iter().map(normalize_literal).collect();
                values.sort();
                values.dedup();
                Condition::In { values }
            }
            Condition::Like { pattern } => Condition::Like {
                pattern: pattern.clone(),
            },
        };
        filters.push(Predicate { column, cond });
    }
    filters.sort_by_cached_key(predicate_key);
    filters.dedup();

    let mut group_by = q
        .group_by
        .iter()
        .map(|c| r.resolve(c))
        .collect::<Result<Vec<_>, _>>()?;
    group_by.sort_by_cached_key(|c| c.to_string());
    group_by.dedup();

    let bin = match &q.bin {
        Some(b) => {
            let column = r.resolve(&b.column)?;
            let dtype = r.dtype(&column);
            let ok = match b.unit {
                BinUnit::Interval(_) => dtype == DType::Number,
                _ => dtype == DType::Time,
            };
            if !ok {
                return Err(VqlError::semantic(format!(
                    "cannot bin {column} ({dtype:?}) by {}",
                    b.unit
                )));
            }
            Some(BinSpec { column, unit: b.unit })
        }
        None => None,
    };

    let out = VqlQuery {
        chart: q.chart,
        x,
        y,
        color,
        from_table: r.tables[0].clone(),
        joins,
        filters,
        group_by,
        bin,
        order: q.order,
    };
    validate_with(&out, |a, b| a == b)?;
    Ok(out)
}

/// Canonical surface string, the identity used for deduplication and splits.
pub fn canonical_string(q: &VqlQuery, schema: &DatabaseSchema) -> Result<String, VqlError> {
    canonicalize(q, schema).map(|c| unparse::unparse_vql(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SchemaSet;
    use crate::vql::{parse_vql, unparse_vql};

    fn schema() -> DatabaseSchema {
        let json = r#"{"databases": [{"db_id": "cinema", "tables": [
            {"name": "movies", "columns": [{"name": "id", "type": "number"}, {"name": "name", "type": "text"},
                {"name": "stars", "type": "number"}, {"name": "release_date", "type": "time"}, {"name": "studio_id", "type": "number"}]},
            {"name": "studio", "columns": [{"name": "id", "type": "number"}, {"name": "title", "type": "text"}]}
        ]}]}"#;
        SchemaSet::from_json(json).unwrap().get("cinema").unwrap().clone()
    }

    fn canon(text: &str) -> Result<String, VqlError> {
        canonical_string(&parse_vql(text).unwrap(), &schema())
    }

    #[test]
    fn unqualified_name_is_table_qualified() {
        assert_eq!(
            canon("Visualize BAR SELECT Name , COUNT(name) FROM Movies GROUP BY name").unwrap(),
            "Visualize BAR SELECT movies.name , COUNT(movies.name) FROM movies GROUP BY movies.name"
        );
    }

    #[test]
    fn filters_are_sorted() {
        let text = canon("Visualize BAR SELECT name , stars FROM movies WHERE stars = 2 AND id = 1").unwrap();
        assert!(text.ends_with("WHERE movies.id = 1 AND movies.stars = 2"), "{text}");
    }

    #[test]
    fn duplicate_filters_collapse() {
        let text = canon("Visualize BAR SELECT name , stars FROM movies WHERE id = 1 AND id = 1.0").unwrap();
        assert!(text.ends_with("WHERE movies.id = 1"), "{text}");
    }

    #[test]
    fn join_keys_are_oriented() {
        let text = canon(
            "Visualize BAR SELECT title , COUNT(name) FROM movies JOIN studio ON studio.id = movies.studio_id GROUP BY title",
        )
        .unwrap();
        assert!(text.contains("JOIN studio ON movies.studio_id = studio.id"), "{text}");
    }

    #[test]
    fn ambiguous_and_missing_columns_fail() {
        let ambiguous = canon(
            "Visualize BAR SELECT id , COUNT(name) FROM movies JOIN studio ON studio.id = movies.studio_id GROUP BY id",
        );
        assert!(matches!(ambiguous, Err(VqlError::Resolution(ref m)) if m.contains("ambiguous")));
        let missing = canon("Visualize BAR SELECT nope , stars FROM movies");
        assert!(matches!(missing, Err(VqlError::Resolution(_))));
        let foreign = canon("Visualize BAR SELECT studio.title , stars FROM movies");
        assert!(matches!(foreign, Err(VqlError::Resolution(_))));
    }

    #[test]
    fn bin_and_aggregate_types_are_checked() {
        assert!(canon("Visualize LINE SELECT name , COUNT(name) FROM movies BIN name BY MONTH").is_err());
        assert!(canon("Visualize LINE SELECT release_date , COUNT(name) FROM movies BIN release_date BY INTERVAL 3").is_err());
        assert!(canon("Visualize BAR SELECT name , SUM(name) FROM movies GROUP BY name").is_err());
        assert!(canon("Visualize LINE SELECT release_date , AVG(stars) FROM movies BIN release_date BY WEEKDAY").is_ok());
    }

    #[test]
    fn idempotent_on_example() {
        let q = parse_vql("Visualize BAR SELECT name , COUNT(name) FROM movies WHERE stars BETWEEN 3 AND 5 AND id IN (3 , 1 , 3) GROUP BY name ORDER BY X DESC").unwrap();
        let once = canonicalize(&q, &schema()).unwrap();
        let twice = canonicalize(&once, &schema()).unwrap();
        assert_eq!(once, twice);
        assert_eq!(parse_vql(&unparse_vql(&once)).unwrap(), once);
    }
}
