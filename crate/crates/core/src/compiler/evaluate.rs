use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use super::{Cell, CompileError, Database, Relation, Timestamp, WEEKDAYS};
use crate::dataset::DType;
use crate::exec::Exec;
use crate::vql::{
    AggFn, Axis, BinUnit, CmpOp, ColumnRef, Condition, Direction, Literal, Predicate, VqlQuery,
    YArg,
};

/// Field names of the result columns: `(x, color, y)`.
pub fn output_fields(q: &VqlQuery) -> (String, Option<String>, String) {
    let x = q.x.column.to_ascii_lowercase();
    let color = q.color.as_ref().map(|c| {
        let name = c.column.to_ascii_lowercase();
        if name == x {
            match &c.table {
                Some(t) => format!("{}_{}", t.to_ascii_lowercase(), name),
                None => format!("color_{name}"),
            }
        } else {
            name
        }
    });
    let mut y = match (&q.y.agg, &q.y.arg) {
        (AggFn::Count, YArg::Star) => "count".to_string(),
        (AggFn::None, YArg::Column(c)) => c.column.to_ascii_lowercase(),
        (AggFn::None, YArg::Star) => "value".to_string(),
        (agg, YArg::Column(c)) => format!(
            "{}_{}",
            agg.keyword().unwrap_or_default().to_ascii_lowercase(),
            c.column.to_ascii_lowercase()
        ),
        (agg, YArg::Star) => agg.keyword().unwrap_or_default().to_ascii_lowercase(),
    };
    while y == x || color.as_deref() == Some(y.as_str()) {
        y = format!("y_{y}");
    }
    (x, color, y)
}

fn fmt_number(n: f64) -> String {
    format!("{}", if n == 0.0 { 0.0 } else { n })
}

/// Bucket of a cell: an ordinal for ordering plus its display label.
pub(crate) fn bin_key(cell: &Cell, unit: BinUnit) -> Result<Option<(i64, String)>, CompileError> {
    let mismatch = || {
        CompileError::Type(format!(
            "cannot bin {} value by {unit}",
            match cell.dtype() {
                Some(DType::Text) => "text",
                Some(DType::Number) => "number",
                Some(DType::Time) => "time",
                None => "null",
            }
        ))
    };
    match (cell, unit) {
        (Cell::Null, _) => Ok(None),
        (Cell::Time(t), BinUnit::Year) => Ok(Some((t.year as i64, format!("{:04}", t.year)))),
        (Cell::Time(t), BinUnit::Month) => Ok(Some((
            t.year as i64 * 12 + t.month as i64,
            format!("{:04}-{:02}", t.year, t.month),
        ))),
        (Cell::Time(t), BinUnit::Weekday) => {
            let w = t.weekday();
            Ok(Some((w as i64, WEEKDAYS[w].to_string())))
        }
        (Cell::Time(t), BinUnit::Day) => {
            let day = Timestamp::date(t.year, t.month, t.day).expect("valid date");
            Ok(Some((day.days_since_epoch(), day.to_string())))
        }
        (Cell::Number(v), BinUnit::Interval(n)) => {
            if !(n.is_finite() && n > 0.0) {
                return Err(CompileError::Type(format!("bin width must be positive, got {n}")));
            }
            let k = (v / n).floor();
            Ok(Some((
                k as i64,
                format!("[{}, {})", fmt_number(k * n), fmt_number((k + 1.0) * n)),
            )))
        }
        _ => Err(mismatch()),
    }
}

/// Bucket label of one cell; null cells have no bucket.
pub fn bin_value(cell: &Cell, unit: BinUnit) -> Result<Option<String>, CompileError> {
    Ok(bin_key(cell, unit)?.map(|(_, label)| label))
}

/// `%` matches any run of characters, `_` exactly one; case-sensitive.
pub fn like_match(text: &str, pattern: &str) -> bool {
    let t: Vec<char> = text.chars().collect();
    let p: Vec<char> = pattern.chars().collect();
    let (mut ti, mut pi) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && (p[pi] == '_' || (p[pi] != '%' && p[pi] == t[ti])) {
            ti += 1;
            pi += 1;
        } else if pi < p.len() && p[pi] == '%' {
            star = Some((pi, ti));
            pi += 1;
        } else if let Some((sp, st)) = star {
            pi = sp + 1;
            ti = st + 1;
            star = Some((sp, st + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '%')
}

/// Grouping/sorting value: a plain cell or a bucket.
#[derive(Debug, Clone)]
enum Val {
    Cell(Cell),
    Bin(i64, String),
}

impl Val {
    fn into_cell(self) -> Cell {
        match self {
            Val::Cell(c) => c,
            Val::Bin(_, label) => Cell::Text(label),
        }
    }
}

impl PartialEq for Val {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Val {}

impl PartialOrd for Val {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Val {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Val::Cell(a), Val::Cell(b)) => a.total_cmp(b),
            (Val::Bin(a, la), Val::Bin(b, lb)) => a.cmp(b).then_with(|| la.cmp(lb)),
            (Val::Cell(_), Val::Bin(..)) => Ordering::Less,
            (Val::Bin(..), Val::Cell(_)) => Ordering::Greater,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum JoinKey {
    Number(u64),
    Text(String),
    Time(Timestamp),
}

fn join_key(cell: &Cell) -> Option<JoinKey> {
    match cell {
        Cell::Null => None,
        Cell::Number(n) => Some(JoinKey::Number(if *n == 0.0 { 0.0f64 } else { *n }.to_bits())),
        Cell::Text(s) => Some(JoinKey::Text(s.clone())),
        Cell::Time(t) => Some(JoinKey::Time(*t)),
    }
}

/// Rows of the joined tables with `(table, column, dtype)` headers.
struct Working {
    columns: Vec<(String, String, DType)>,
    rows: Vec<Vec<Cell>>,
}

impl Working {
    fn from_table(name: &str, rel: &Relation) -> Self {
        Working {
            columns: rel
                .columns
                .iter()
                .map(|(c, t)| (name.to_string(), c.to_ascii_lowercase(), *t))
                .collect(),
            rows: rel.rows.clone(),
        }
    }

    fn has_table(&self, table: &str) -> bool {
        self.columns.iter().any(|(t, _, _)| t == table)
    }

    fn index(&self, c: &ColumnRef) -> Result<usize, CompileError> {
        let col = c.column.to_ascii_lowercase();
        let found: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, (t, n, _))| {
                *n == col
                    && c
                        .table
                        .as_ref()
                        .is_none_or(|want| want.eq_ignore_ascii_case(t))
            })
            .map(|(i, _)| i)
            .collect();
        match found.as_slice() {
            [i] => Ok(*i),
            [] => Err(CompileError::MissingColumn(c.to_string())),
            _ => Err(CompileError::MissingColumn(format!("{c} is ambiguous"))),
        }
    }

    fn dtype(&self, i: usize) -> DType {
        self.columns[i].2
    }
}

fn lookup<'a>(db: &'a Database, table: &str) -> Result<&'a Relation, CompileError> {
    db.get(&table.to_ascii_lowercase())
        .or_else(|| db.iter().find(|(k, _)| k.eq_ignore_ascii_case(table)).map(|(_, v)| v))
        .ok_or_else(|| CompileError::MissingTable(table.to_string()))
}

fn apply_joins(q: &VqlQuery, db: &Database) -> Result<Working, CompileError> {
    let from = q.from_table.to_ascii_lowercase();
    let mut work = Working::from_table(&from, lookup(db, &from)?);
    let mut pending: Vec<_> = q.joins.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut i = 0;
        while i < pending.len() {
            let j = pending[i];
            let table = j.table.to_ascii_lowercase();
            let side_of = |c: &ColumnRef| c.table.as_ref().map(|t| t.to_ascii_lowercase());
            let (new_col, old_col) = if side_of(&j.left).as_deref() == Some(table.as_str()) {
                (&j.left, &j.right)
            } else if side_of(&j.right).as_deref() == Some(table.as_str()) {
                (&j.right, &j.left)
            } else {
                return Err(CompileError::MissingColumn(format!(
                    "join on {} names no column of {}",
                    table, j.table
                )));
            };
            let ready = old_col
                .table
                .as_ref()
                .is_none_or(|t| work.has_table(&t.to_ascii_lowercase()));
            if !ready {
                i += 1;
                continue;
            }
            let right = lookup(db, &table)?;
            let right_work = Working::from_table(&table, right);
            let new_idx = right_work.index(new_col)?;
            let old_idx = work.index(old_col)?;
            let mut by_key: HashMap<JoinKey, Vec<usize>> = HashMap::new();
            for (r, row) in right.rows.iter().enumerate() {
                if let Some(k) = join_key(&row[new_idx]) {
                    by_key.entry(k).or_default().push(r);
                }
            }
            let mut rows = Vec::new();
            for row in &work.rows {
                let Some(k) = join_key(&row[old_idx]) else {
                    continue;
                };
                for &r in by_key.get(&k).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut joined = row.clone();
                    joined.extend(right.rows[r].iter().cloned());
                    rows.push(joined);
                }
            }
            work.columns.extend(right_work.columns);
            work.rows = rows;
            pending.remove(i);
        }
        if pending.len() == before {
            return Err(CompileError::MissingTable(format!(
                "join on {} references a table not in scope",
                pending[0].table
            )));
        }
    }
    Ok(work)
}

fn coerce(lit: &Literal, dtype: DType) -> Result<Cell, CompileError> {
    match (lit, dtype) {
        (Literal::Number(n), DType::Number) => Ok(Cell::Number(*n)),
        (Literal::String(s), DType::Number) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|n| n.is_finite())
            .map(Cell::Number)
            .ok_or_else(|| CompileError::Type(format!("{lit} is not a number"))),
        (Literal::String(s), DType::Text) => Ok(Cell::Text(s.clone())),
        (Literal::Number(n), DType::Text) => Ok(Cell::Text(fmt_number(*n))),
        (Literal::String(s), DType::Time) => Timestamp::parse(s)
            .map(Cell::Time)
            .ok_or_else(|| CompileError::Type(format!("{lit} is not a time"))),
        (Literal::Number(_), DType::Time) => {
            Err(CompileError::Type(format!("cannot compare time with {lit}")))
        }
    }
}

enum Test {
    Compare(CmpOp, Cell),
    Between(Cell, Cell),
    In(Vec<Cell>),
    Like(String),
}

struct Filter {
    index: usize,
    test: Test,
}

impl Filter {
    fn compile(p: &Predicate, work: &Working) -> Result<Self, CompileError> {
        let index = work.index(&p.column)?;
        let dtype = work.dtype(index);
        let test = match &p.cond {
            Condition::Compare { op, value } => Test::Compare(*op, coerce(value, dtype)?),
            Condition::Between { low, high } => {
                Test::Between(coerce(low, dtype)?, coerce(high, dtype)?)
            }
            Condition::In { values } => Test::In(
                values
                    .iter()
                    .map(|v| coerce(v, dtype))
                    .collect::<Result<_, _>>()?,
            ),
            Condition::Like { pattern } => {
                if dtype != DType::Text {
                    return Err(CompileError::Type(format!(
                        "LIKE needs a text column, {} is {dtype:?}",
                        p.column
                    )));
                }
                Test::Like(pattern.clone())
            }
        };
        Ok(Filter { index, test })
    }

    fn keeps(&self, row: &[Cell]) -> bool {
        let cell = &row[self.index];
        if cell.is_null() {
            return matches!(self.test, Test::Compare(CmpOp::Ne, _));
        }
        match &self.test {
            Test::Compare(op, v) => op.holds(cell.total_cmp(v)),
            Test::Between(lo, hi) => {
                cell.total_cmp(lo) != Ordering::Less && cell.total_cmp(hi) != Ordering::Greater
            }
            Test::In(vs) => vs.iter().any(|v| cell.total_cmp(v) == Ordering::Equal),
            Test::Like(p) => match cell {
                Cell::Text(s) => like_match(s, p),
                _ => false,
            },
        }
    }
}

fn aggregate(agg: AggFn, cells: &[&Cell], star: bool) -> Cell {
    let present = || cells.iter().copied().filter(|c| !c.is_null());
    match agg {
        AggFn::Count if star => Cell::Number(cells.len() as f64),
        AggFn::Count => Cell::Number(present().count() as f64),
        AggFn::Sum | AggFn::Avg => {
            let nums: Vec<f64> = present().filter_map(Cell::as_number).collect();
            if nums.is_empty() {
                return Cell::Null;
            }
            let sum: f64 = nums.iter().sum();
            if agg == AggFn::Sum {
                Cell::Number(sum)
            } else {
                Cell::Number(sum / nums.len() as f64)
            }
        }
        AggFn::Min => present().min_by(|a, b| a.total_cmp(b)).cloned().unwrap_or(Cell::Null),
        AggFn::Max => present().max_by(|a, b| a.total_cmp(b)).cloned().unwrap_or(Cell::Null),
        AggFn::None => cells.first().map(|c| (*c).clone()).unwrap_or(Cell::Null),
    }
}

/// Run a resolved query over in-memory tables.
pub fn evaluate_query(q: &VqlQuery, db: &Database) -> Result<Relation, CompileError> {
    let mut work = apply_joins(q, db)?;

    let filters = q
        .filters
        .iter()
        .map(|p| Filter::compile(p, &work))
        .collect::<Result<Vec<_>, _>>()?;
    work.rows.retain(|row| filters.iter().all(|f| f.keeps(row)));

    let x_idx = work.index(&q.x)?;
    let color_idx = q.color.as_ref().map(|c| work.index(c)).transpose()?;
    let y_idx = match &q.y.arg {
        YArg::Star => None,
        YArg::Column(c) => Some(work.index(c)?),
    };
    let star = y_idx.is_none();
    if star && q.y.agg != AggFn::Count {
        return Err(CompileError::Type("only COUNT accepts *".into()));
    }
    if matches!(q.y.agg, AggFn::Sum | AggFn::Avg) {
        let i = y_idx.expect("column argument");
        if work.dtype(i) != DType::Number {
            return Err(CompileError::Type(format!(
                "{} over {:?} column {}",
                q.y.agg.keyword().unwrap_or_default(),
                work.dtype(i),
                work.columns[i].1
            )));
        }
    }

    // BIN replaces x with its bucket; rows whose x is null drop out.
    let bin_unit = match &q.bin {
        Some(b) => {
            let bi = work.index(&b.column)?;
            if bi != x_idx {
                return Err(CompileError::Type(format!("BIN column {} is not x", b.column)));
            }
            let ok = match b.unit {
                BinUnit::Interval(_) => work.dtype(x_idx) == DType::Number,
                _ => work.dtype(x_idx) == DType::Time,
            };
            if !ok {
                return Err(CompileError::Type(format!(
                    "cannot bin {:?} column {} by {}",
                    work.dtype(x_idx),
                    b.column,
                    b.unit
                )));
            }
            Some(b.unit)
        }
        None => None,
    };
    let mut xs = Vec::with_capacity(work.rows.len());
    let mut kept = Vec::with_capacity(work.rows.len());
    for row in std::mem::take(&mut work.rows) {
        let x = match bin_unit {
            Some(unit) => match bin_key(&row[x_idx], unit)? {
                Some((ord, label)) => Val::Bin(ord, label),
                None => continue,
            },
            None => Val::Cell(row[x_idx].clone()),
        };
        xs.push(x);
        kept.push(row);
    }

    let mut out: Vec<(Val, Option<Val>, Cell)> = Vec::new();
    if q.y.agg == AggFn::None {
        for (x, row) in xs.into_iter().zip(&kept) {
            let color = color_idx.map(|i| Val::Cell(row[i].clone()));
            out.push((x, color, row[y_idx.expect("column argument")].clone()));
        }
    } else {
        let extra: Vec<usize> = q
            .group_by
            .iter()
            .map(|c| work.index(c))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|&i| i != x_idx && Some(i) != color_idx)
            .collect();
        let mut groups: BTreeMap<(Val, Option<Val>, Vec<Val>), Vec<&Cell>> = BTreeMap::new();
        for (x, row) in xs.into_iter().zip(&kept) {
            let color = color_idx.map(|i| Val::Cell(row[i].clone()));
            let rest = extra.iter().map(|&i| Val::Cell(row[i].clone())).collect();
            let arg = match y_idx {
                Some(i) => &row[i],
                None => &Cell::Null,
            };
            groups.entry((x, color, rest)).or_default().push(arg);
        }
        for ((x, color, _), cells) in groups {
            out.push((x, color, aggregate(q.y.agg, &cells, star)));
        }
    }

    out.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.total_cmp(&b.2))
    });
    if let Some(order) = q.order {
        out.sort_by(|a, b| {
            let ord = match order.target {
                Axis::X => a.0.cmp(&b.0),
                Axis::Y => a.2.total_cmp(&b.2),
            };
            match order.direction {
                Direction::Asc => ord,
                Direction::Desc => ord.reverse(),
            }
        });
    }

    let (x_name, color_name, y_name) = output_fields(q);
    let x_type = if bin_unit.is_some() {
        DType::Text
    } else {
        work.dtype(x_idx)
    };
    let y_type = match q.y.agg {
        AggFn::Count | AggFn::Sum | AggFn::Avg => DType::Number,
        _ => work.dtype(y_idx.expect("column argument")),
    };
    let mut columns = vec![(x_name, x_type)];
    if let (Some(name), Some(i)) = (color_name, color_idx) {
        columns.push((name, work.dtype(i)));
    }
    columns.push((y_name, y_type));
    let mut result = Relation::new(columns);
    result.rows = out
        .into_iter()
        .map(|(x, color, y)| {
            let mut row = vec![x.into_cell()];
            if let Some(c) = color {
                row.push(c.into_cell());
            }
            row.push(y);
            row
        })
        .collect();
    Ok(result)
}

/// Evaluate many queries over one database.
pub fn evaluate_all(
    queries: &[VqlQuery],
    db: &Database,
    exec: Exec,
) -> Vec<Result<Relation, CompileError>> {
    exec.map(queries, |q| evaluate_query(q, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SchemaSet;
    use crate::vql::{canonicalize, parse_vql};

    fn t(s: &str) -> Cell {
        Cell::Time(Timestamp::parse(s).unwrap())
    }

    #[test]
    fn bin_labels() {
        assert_eq!(bin_value(&t("2024-07-03"), BinUnit::Weekday).unwrap().unwrap(), "Wed");
        assert_eq!(bin_value(&t("2024-07-03"), BinUnit::Month).unwrap().unwrap(), "2024-07");
        assert_eq!(bin_value(&t("2024-07-03"), BinUnit::Year).unwrap().unwrap(), "2024");
        assert_eq!(bin_value(&t("2024-07-03 10:00"), BinUnit::Day).unwrap().unwrap(), "2024-07-03");
        let ten = BinUnit::Interval(10.0);
        assert_eq!(bin_value(&Cell::Number(17.0), ten).unwrap().unwrap(), "[10, 20)");
        assert_eq!(bin_value(&Cell::Number(-5.0), ten).unwrap().unwrap(), "[-10, 0)");
        assert_eq!(bin_value(&Cell::Number(0.0), ten).unwrap().unwrap(), "[0, 10)");
        assert_eq!(bin_value(&Cell::Null, ten).unwrap(), None);
        assert!(matches!(bin_value(&Cell::Number(1.0), BinUnit::Month), Err(CompileError::Type(_))));
        assert!(matches!(bin_value(&t("2024-01-01"), ten), Err(CompileError::Type(_))));
    }

    #[test]
    fn like_wildcards() {
        assert!(like_match("David", "%D%"));
        assert!(!like_match("david", "%D%"));
        assert!(like_match("abc", "a_c"));
        assert!(!like_match("abbc", "a_c"));
        assert!(like_match("", "%"));
        assert!(like_match("a%b", "a%%b"));
        assert!(!like_match("ab", "abc%"));
        assert!(like_match("中文字", "中_%"));
    }

    fn fixture() -> (SchemaSet, Database) {
        let schemas = SchemaSet::from_json(
            r#"{"databases": [{"db_id": "d", "tables": [{"name": "t", "columns": [
                {"name": "c", "type": "text"}, {"name": "v", "type": "number"}]}]}]}"#,
        )
        .unwrap();
        let mut rel = Relation::new(vec![("c".into(), DType::Text), ("v".into(), DType::Number)]);
        for (c, v) in [("a", Some(1.0)), ("a", None), ("b", Some(4.0))] {
            rel.rows.push(vec![Cell::Text(c.into()), v.map_or(Cell::Null, Cell::Number)]);
        }
        let mut db = Database::new();
        db.insert("t".into(), rel);
        (schemas, db)
    }

    fn run(vql: &str) -> Result<Relation, CompileError> {
        let (schemas, db) = fixture();
        let q = canonicalize(&parse_vql(vql).unwrap(), schemas.get("d").unwrap()).unwrap();
        evaluate_query(&q, &db)
    }

    #[test]
    fn count_groups() {
        let r = run("Visualize BAR SELECT c , COUNT(c) FROM t GROUP BY c").unwrap();
        assert_eq!(r.columns, vec![("c".into(), DType::Text), ("count_c".into(), DType::Number)]);
        assert_eq!(
            r.rows,
            vec![
                vec![Cell::Text("a".into()), Cell::Number(2.0)],
                vec![Cell::Text("b".into()), Cell::Number(1.0)],
            ]
        );
    }

    #[test]
    fn nulls_drop_from_aggregates_and_predicates() {
        let r = run("Visualize BAR SELECT c , COUNT(v) FROM t GROUP BY c").unwrap();
        assert_eq!(r.rows[0][1], Cell::Number(1.0));
        let r = run("Visualize BAR SELECT c , v FROM t WHERE v != 4").unwrap();
        assert_eq!(r.len(), 2);
        let r = run("Visualize BAR SELECT c , v FROM t WHERE v < 100").unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn order_by_y_descending() {
        let r = run("Visualize BAR SELECT c , SUM(v) FROM t GROUP BY c ORDER BY Y DESC").unwrap();
        assert_eq!(r.rows[0][0], Cell::Text("b".into()));
    }

    #[test]
    fn sum_over_text_is_type_error() {
        let (schemas, db) = fixture();
        let mut q = canonicalize(
            &parse_vql("Visualize BAR SELECT c , SUM(v) FROM t GROUP BY c").unwrap(),
            schemas.get("d").unwrap(),
        )
        .unwrap();
        q.y.arg = YArg::Column(ColumnRef::qualified("t", "c"));
        assert!(matches!(evaluate_query(&q, &db), Err(CompileError::Type(_))));
    }

    #[test]
    fn empty_table_gives_header_only() {
        let (schemas, mut db) = fixture();
        db.get_mut("t").unwrap().rows.clear();
        let q = canonicalize(
            &parse_vql("Visualize PIE SELECT c , AVG(v) FROM t GROUP BY c").unwrap(),
            schemas.get("d").unwrap(),
        )
        .unwrap();
        let r = evaluate_query(&q, &db).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.columns.len(), 2);
    }

    #[test]
    fn missing_table_is_reported() {
        let (schemas, _) = fixture();
        let q = canonicalize(
            &parse_vql("Visualize BAR SELECT c , v FROM t").unwrap(),
            schemas.get("d").unwrap(),
        )
        .unwrap();
        assert!(matches!(evaluate_query(&q, &Database::new()), Err(CompileError::MissingTable(_))));
    }

    #[test]
    fn literal_coercion_errors_even_on_empty_input() {
        let (schemas, mut db) = fixture();
        db.get_mut("t").unwrap().rows.clear();
        let q = canonicalize(
            &parse_vql("Visualize BAR SELECT c , v FROM t WHERE v = 'many'").unwrap(),
            schemas.get("d").unwrap(),
        );
        if let Ok(q) = q {
            assert!(matches!(evaluate_query(&q, &db), Err(CompileError::Type(_))));
        }
    }
}
