//! Reference evaluator: cross product of every table, then filter, then
//! bucket, then group by linear search. Slow and obvious on purpose.

use std::cmp::Ordering;

use chrono::{Datelike, NaiveDate, NaiveDateTime};

use t2v_core::compiler::{Cell, Database, Timestamp};
use t2v_core::dataset::DType;
use t2v_core::vql::{AggFn, BinUnit, CmpOp, ColumnRef, Condition, Literal, VqlQuery, YArg};

/// Recursive LIKE: `%` any run, `_` one character.
pub fn like_oracle(text: &str, pattern: &str) -> bool {
    fn go(t: &[char], p: &[char]) -> bool {
        match p.first() {
            None => t.is_empty(),
            Some('%') => (0..=t.len()).any(|i| go(&t[i..], &p[1..])),
            Some('_') => !t.is_empty() && go(&t[1..], &p[1..]),
            Some(c) => t.first() == Some(c) && go(&t[1..], &p[1..]),
        }
    }
    let t: Vec<char> = text.chars().collect();
    let p: Vec<char> = pattern.chars().collect();
    go(&t, &p)
}

fn to_chrono(t: &Timestamp) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(t.year, t.month as u32, t.day as u32)
        .unwrap()
        .and_hms_opt(t.hour as u32, t.minute as u32, t.second as u32)
        .unwrap()
}

fn parse_time(s: &str) -> Option<NaiveDateTime> {
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t);
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).unwrap())
}

/// Compare a non-null cell with a literal under the column's type; `None`
/// when the literal cannot be read as that type.
fn compare(cell: &Cell, lit: &Literal) -> Option<Ordering> {
    match (cell, lit) {
        (Cell::Number(a), Literal::Number(b)) => a.partial_cmp(b),
        (Cell::Number(a), Literal::String(s)) => a.partial_cmp(&s.trim().parse::<f64>().ok()?),
        (Cell::Text(a), Literal::String(b)) => Some(a.as_str().cmp(b.as_str())),
        (Cell::Text(a), Literal::Number(b)) => Some(a.as_str().cmp(format!("{b}").as_str())),
        (Cell::Time(a), Literal::String(s)) => Some(to_chrono(a).cmp(&parse_time(s)?)),
        _ => None,
    }
}

fn holds(op: CmpOp, ord: Ordering) -> bool {
    match op {
        CmpOp::Eq => ord.is_eq(),
        CmpOp::Ne => ord.is_ne(),
        CmpOp::Lt => ord.is_lt(),
        CmpOp::Le => ord.is_le(),
        CmpOp::Gt => ord.is_gt(),
        CmpOp::Ge => ord.is_ge(),
    }
}

fn keep(cell: &Cell, cond: &Condition) -> Result<bool, String> {
    let bad = || format!("literal does not fit {cell:?}");
    if let Cell::Null = cell {
        return Ok(matches!(cond, Condition::Compare { op: CmpOp::Ne, .. }));
    }
    Ok(match cond {
        Condition::Compare { op, value } => holds(*op, compare(cell, value).ok_or_else(bad)?),
        Condition::Between { low, high } => {
            compare(cell, low).ok_or_else(bad)?.is_ge() && compare(cell, high).ok_or_else(bad)?.is_le()
        }
        Condition::In { values } => {
            let mut any = false;
            for v in values {
                any |= compare(cell, v).ok_or_else(bad)?.is_eq();
            }
            any
        }
        Condition::Like { pattern } => match cell {
            Cell::Text(s) => like_oracle(s, pattern),
            _ => return Err("LIKE on non-text".into()),
        },
    })
}

fn bucket(cell: &Cell, unit: BinUnit) -> Result<Option<String>, String> {
    match (cell, unit) {
        (Cell::Null, _) => Ok(None),
        (Cell::Time(t), BinUnit::Year) => Ok(Some(to_chrono(t).format("%Y").to_string())),
        (Cell::Time(t), BinUnit::Month) => Ok(Some(to_chrono(t).format("%Y-%m").to_string())),
        (Cell::Time(t), BinUnit::Day) => Ok(Some(to_chrono(t).format("%Y-%m-%d").to_string())),
        (Cell::Time(t), BinUnit::Weekday) => Ok(Some(to_chrono(t).weekday().to_string())),
        (Cell::Number(v), BinUnit::Interval(n)) => {
            let mut k = 0f64;
            // Walk to the bucket instead of dividing.
            while k * n > *v {
                k -= 1.0;
            }
            while (k + 1.0) * n <= *v {
                k += 1.0;
            }
            let show = |x: f64| format!("{}", if x == 0.0 { 0.0 } else { x });
            Ok(Some(format!("[{}, {})", show(k * n), show((k + 1.0) * n))))
        }
        _ => Err("bin unit does not fit column".into()),
    }
}

fn same(a: &Cell, b: &Cell) -> bool {
    match (a, b) {
        (Cell::Number(x), Cell::Number(y)) => x == y,
        (Cell::Text(x), Cell::Text(y)) => x == y,
        (Cell::Time(x), Cell::Time(y)) => x == y,
        (Cell::Null, Cell::Null) => true,
        _ => false,
    }
}

struct Flat<'a> {
    names: Vec<(String, String, DType)>,
    cells: Vec<&'a Cell>,
}

impl Flat<'_> {
    fn get(&self, c: &ColumnRef) -> &Cell {
        let t = c.table.as_deref().unwrap().to_ascii_lowercase();
        let col = c.column.to_ascii_lowercase();
        let i = self
            .names
            .iter()
            .position(|(a, b, _)| *a == t && *b == col)
            .unwrap_or_else(|| panic!("oracle: no column {c}"));
        self.cells[i]
    }
}

/// Result rows `(x, [color], y)` of a canonical query, in no particular
/// order. Errors are strings: only their presence is compared.
pub fn oracle_evaluate(q: &VqlQuery, db: &Database) -> Result<Vec<Vec<Cell>>, String> {
    let tables: Vec<String> = q.tables().iter().map(|t| t.to_ascii_lowercase()).collect();
    let rels: Vec<_> = tables
        .iter()
        .map(|t| db.get(t).ok_or_else(|| format!("no table {t}")))
        .collect::<Result<_, _>>()?;
    let names: Vec<(String, String, DType)> = tables
        .iter()
        .zip(&rels)
        .flat_map(|(t, r)| r.columns.iter().map(move |(c, d)| (t.clone(), c.to_ascii_lowercase(), *d)))
        .collect();

    // Odometer over every combination of rows.
    let mut combos: Vec<Flat> = Vec::new();
    if rels.iter().all(|r| !r.rows.is_empty()) {
        let mut idx = vec![0usize; rels.len()];
        'outer: loop {
            let cells = rels
                .iter()
                .zip(&idx)
                .flat_map(|(r, &i)| r.rows[i].iter())
                .collect();
            combos.push(Flat {
                names: names.clone(),
                cells,
            });
            for d in (0..idx.len()).rev() {
                idx[d] += 1;
                if idx[d] < rels[d].rows.len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
    }

    let mut kept = Vec::new();
    for f in combos {
        let joined = q.joins.iter().all(|j| {
            let (a, b) = (f.get(&j.left), f.get(&j.right));
            !matches!(a, Cell::Null) && same(a, b)
        });
        if !joined {
            continue;
        }
        let mut pass = true;
        for p in &q.filters {
            if !keep(f.get(&p.column), &p.cond)? {
                pass = false;
            }
        }
        if pass {
            kept.push(f);
        }
    }

    // Evaluate type errors that do not depend on rows.
    if let (AggFn::Sum | AggFn::Avg, YArg::Column(c)) = (&q.y.agg, &q.y.arg) {
        let t = names
            .iter()
            .find(|(a, b, _)| Some(a.as_str()) == c.table.as_deref() && *b == c.column)
            .map(|n| n.2);
        if t != Some(DType::Number) {
            return Err("SUM/AVG over non-number".into());
        }
    }

    let x_of = |f: &Flat| -> Result<Option<Cell>, String> {
        match &q.bin {
            Some(b) => Ok(bucket(f.get(&b.column), b.unit)?.map(Cell::Text)),
            None => Ok(Some(f.get(&q.x).clone())),
        }
    };

    let mut out = Vec::new();
    if q.y.agg == AggFn::None {
        let YArg::Column(yc) = &q.y.arg else {
            return Err("bare *".into());
        };
        for f in &kept {
            let Some(x) = x_of(f)? else { continue };
            let mut row = vec![x];
            if let Some(c) = &q.color {
                row.push(f.get(c).clone());
            }
            row.push(f.get(yc).clone());
            out.push(row);
        }
        return Ok(out);
    }

    let mut keys: Vec<ColumnRef> = Vec::new();
    for g in &q.group_by {
        if *g != q.x && Some(g) != q.color.as_ref() {
            keys.push(g.clone());
        }
    }
    let mut groups: Vec<(Vec<Cell>, Vec<&Flat>)> = Vec::new();
    for f in &kept {
        let Some(x) = x_of(f)? else { continue };
        let mut key = vec![x];
        if let Some(c) = &q.color {
            key.push(f.get(c).clone());
        }
        key.extend(keys.iter().map(|k| f.get(k).clone()));
        match groups
            .iter_mut()
            .find(|(k, _)| k.len() == key.len() && k.iter().zip(&key).all(|(a, b)| same(a, b)))
        {
            Some((_, members)) => members.push(f),
            None => groups.push((key, vec![f])),
        }
    }
    for (key, members) in groups {
        let y = match (&q.y.agg, &q.y.arg) {
            (AggFn::Count, YArg::Star) => Cell::Number(members.len() as f64),
            (agg, YArg::Column(c)) => {
                let vals: Vec<&Cell> = members
                    .iter()
                    .map(|f| f.get(c))
                    .filter(|v| !matches!(v, Cell::Null))
                    .collect();
                match agg {
                    AggFn::Count => Cell::Number(vals.len() as f64),
                    AggFn::Sum | AggFn::Avg if vals.is_empty() => Cell::Null,
                    AggFn::Sum | AggFn::Avg => {
                        let mut total = 0.0;
                        for v in &vals {
                            if let Cell::Number(n) = v {
                                total += n;
                            }
                        }
                        if *agg == AggFn::Sum {
                            Cell::Number(total)
                        } else {
                            Cell::Number(total / vals.len() as f64)
                        }
                    }
                    AggFn::Min | AggFn::Max => {
                        let mut best: Option<&Cell> = None;
                        for v in vals {
                            let better = match best {
                                None => true,
                                Some(b) => {
                                    let ord = order_cells(v, b);
                                    if *agg == AggFn::Min {
                                        ord.is_lt()
                                    } else {
                                        ord.is_gt()
                                    }
                                }
                            };
                            if better {
                                best = Some(v);
                            }
                        }
                        best.cloned().unwrap_or(Cell::Null)
                    }
                    AggFn::None => unreachable!(),
                }
            }
            _ => return Err("aggregate other than COUNT over *".into()),
        };
        let mut row = vec![key[0].clone()];
        if q.color.is_some() {
            row.push(key[1].clone());
        }
        row.push(y);
        out.push(row);
    }
    Ok(out)
}

fn order_cells(a: &Cell, b: &Cell) -> Ordering {
    match (a, b) {
        (Cell::Number(x), Cell::Number(y)) => x.partial_cmp(y).unwrap(),
        (Cell::Text(x), Cell::Text(y)) => x.cmp(y),
        (Cell::Time(x), Cell::Time(y)) => to_chrono(x).cmp(&to_chrono(y)),
        _ => panic!("mixed cells"),
    }
}

/// Rows as strings, sorted, for multiset comparison.
pub fn sorted_rows(rows: &[Vec<Cell>]) -> Vec<String> {
    let mut out: Vec<String> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    Cell::Null => "∅".to_string(),
                    Cell::Number(n) => format!("n{}", if *n == 0.0 { 0.0 } else { *n }),
                    Cell::Text(s) => format!("s{s:?}"),
                    Cell::Time(t) => format!("t{}", to_chrono(t)),
                })
                .collect::<Vec<_>>()
                .join("|")
        })
        .collect();
    out.sort();
    out
}
