use std::fmt::Write;

use super::ast::*;

/// Render a query in canonical surface form: uppercase keywords, single
/// spaces, clauses in fixed order.
pub fn unparse_vql(q: &VqlQuery) -> String {
    let mut out = String::with_capacity(128);
    write!(out, "Visualize {} SELECT {} , {}", q.chart, q.x, y_channel(&q.y)).unwrap();
    if let Some(c) = &q.color {
        write!(out, " , COLOR {c}").unwrap();
    }
    write!(out, " FROM {}", q.from_table).unwrap();
    for j in &q.joins {
        write!(out, " {}", join(j)).unwrap();
    }
    if !q.filters.is_empty() {
        out.push_str(" WHERE ");
        let preds: Vec<String> = q.filters.iter().map(predicate).collect();
        out.push_str(&preds.join(" AND "));
    }
    if !q.group_by.is_empty() {
        out.push_str(" GROUP BY ");
        let cols: Vec<String> = q.group_by.iter().map(|c| c.to_string()).collect();
        out.push_str(&cols.join(" , "));
    }
    if let Some(b) = &q.bin {
        write!(out, " BIN {} BY {}", b.column, b.unit).unwrap();
    }
    if let Some(o) = &q.order {
        let target = match o.target {
            Axis::X => "X",
            Axis::Y => "Y",
        };
        let dir = match o.direction {
            Direction::Asc => "ASC",
            Direction::Desc => "DESC",
        };
        write!(out, " ORDER BY {target} {dir}").unwrap();
    }
    out
}

pub fn y_channel(y: &YChannel) -> String {
    let arg = match &y.arg {
        YArg::Star => "*".to_string(),
        YArg::Column(c) => c.to_string(),
    };
    match y.agg.keyword() {
        Some(kw) => format!("{kw}({arg})"),
        None => arg,
    }
}

pub fn join(j: &Join) -> String {
    format!("JOIN {} ON {} = {}", j.table, j.left, j.right)
}

pub fn predicate(p: &Predicate) -> String {
    match &p.cond {
        Condition::Compare { op, value } => format!("{} {} {}", p.column, op.symbol(), value),
        Condition::Between { low, high } => {
            format!("{} BETWEEN {} AND {}", p.column, low, high)
        }
        Condition::In { values } => {
            let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            format!("{} IN ({})", p.column, vals.join(" , "))
        }
        Condition::Like { pattern } => {
            format!("{} LIKE {}", p.column, Literal::String(pattern.clone()))
        }
    }
}

impl std::fmt::Display for VqlQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&unparse_vql(self))
    }
}
