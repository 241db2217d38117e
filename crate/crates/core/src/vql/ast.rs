//! Typed syntax tree for VQL statements.
//!
//! A [`VqlQuery`] is the central intermediate representation: the decoder
//! produces it, the matcher compares it, and the compiler executes it.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChartType {
    Bar,
    Pie,
    Line,
    Scatter,
    StackedBar,
    GroupedLine,
    GroupedScatter,
}

impl ChartType {
    pub const ALL: [ChartType; 7] = [
        ChartType::Bar,
        ChartType::Pie,
        ChartType::Line,
        ChartType::Scatter,
        ChartType::StackedBar,
        ChartType::GroupedLine,
        ChartType::GroupedScatter,
    ];

    /// Whether this chart type carries a color (series) channel.
    pub fn needs_color(self) -> bool {
        matches!(
            self,
            ChartType::StackedBar | ChartType::GroupedLine | ChartType::GroupedScatter
        )
    }

    /// Surface keywords, e.g. `["STACKED", "BAR"]`.
    pub fn keywords(self) -> &'static [&'static str] {
        match self {
            ChartType::Bar => &["BAR"],
            ChartType::Pie => &["PIE"],
            ChartType::Line => &["LINE"],
            ChartType::Scatter => &["SCATTER"],
            ChartType::StackedBar => &["STACKED", "BAR"],
            ChartType::GroupedLine => &["GROUPED", "LINE"],
            ChartType::GroupedScatter => &["GROUPED", "SCATTER"],
        }
    }

    /// Short column label used in component tables.
    pub fn label(self) -> &'static str {
        match self {
            ChartType::Bar => "Bar",
            ChartType::Pie => "Pie",
            ChartType::Line => "Line",
            ChartType::Scatter => "Scatter",
            ChartType::StackedBar => "SB",
            ChartType::GroupedLine => "GL",
            ChartType::GroupedScatter => "GS",
        }
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.keywords().join(" "))
    }
}

/// A possibly table-qualified column reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnRef {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<String>,
    pub column: String,
}

impl ColumnRef {
    pub fn new(column: impl Into<String>) -> Self {
        ColumnRef {
            table: None,
            column: column.into(),
        }
    }

    pub fn qualified(table: impl Into<String>, column: impl Into<String>) -> Self {
        ColumnRef {
            table: Some(table.into()),
            column: column.into(),
        }
    }

    /// Case-insensitive equality, the comparison identifiers use before
    /// canonicalization.
    pub fn same_as(&self, other: &ColumnRef) -> bool {
        let tables_agree = match (&self.table, &other.table) {
            (Some(a), Some(b)) => a.eq_ignore_ascii_case(b),
            (None, None) => true,
            _ => false,
        };
        tables_agree && self.column.eq_ignore_ascii_case(&other.column)
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.table {
            Some(t) => write!(f, "{}.{}", t, self.column),
            None => f.write_str(&self.column),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AggFn {
    None,
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

impl AggFn {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            AggFn::None => None,
            AggFn::Count => Some("COUNT"),
            AggFn::Sum => Some("SUM"),
            AggFn::Avg => Some("AVG"),
            AggFn::Min => Some("MIN"),
            AggFn::Max => Some("MAX"),
        }
    }

    pub fn from_keyword(word: &str) -> Option<AggFn> {
        Some(match word.to_ascii_uppercase().as_str() {
            "COUNT" => AggFn::Count,
            "SUM" => AggFn::Sum,
            "AVG" => AggFn::Avg,
            "MIN" => AggFn::Min,
            "MAX" => AggFn::Max,
            _ => return None,
        })
    }
}

/// Argument of the y channel: a column or `*` (only under COUNT).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YArg {
    Star,
    Column(ColumnRef),
}

impl YArg {
    pub fn column(&self) -> Option<&ColumnRef> {
        match self {
            YArg::Star => None,
            YArg::Column(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct YChannel {
    pub agg: AggFn,
    pub arg: YArg,
}

/// A string or numeric literal.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    String(String),
}

impl Literal {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Literal::Number(n) => Some(*n),
            Literal::String(_) => None,
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Literal {}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            // -0 and 0 are the same literal.
            (Literal::Number(a), Literal::Number(b)) => {
                if a == b {
                    Ordering::Equal
                } else {
                    a.total_cmp(b)
                }
            }
            (Literal::Number(_), Literal::String(_)) => Ordering::Less,
            (Literal::String(_), Literal::Number(_)) => Ordering::Greater,
            (Literal::String(a), Literal::String(b)) => a.cmp(b),
        }
    }
}

impl std::hash::Hash for Literal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        match self {
            Literal::Number(n) => {
                0u8.hash(state);
                let n = if *n == 0.0 { 0.0f64 } else { *n };
                n.to_bits().hash(state);
            }
            Literal::String(s) => {
                1u8.hash(state);
                s.hash(state);
            }
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(n) => write!(f, "{}", n),
            Literal::String(s) => write!(f, "'{}'", s.replace('\'', "''")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    /// Apply to an ordering of `cell` relative to the literal.
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Compare { op: CmpOp, value: Literal },
    Between { low: Literal, high: Literal },
    In { values: Vec<Literal> },
    Like { pattern: String },
}

impl Condition {
    /// Rank used as the second key when sorting conjuncts.
    pub fn op_name(&self) -> &'static str {
        match self {
            Condition::Compare { op, .. } => op.symbol(),
            Condition::Between { .. } => "BETWEEN",
            Condition::In { .. } => "IN",
            Condition::Like { .. } => "LIKE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    pub column: ColumnRef,
    #[serde(flatten)]
    pub cond: Condition,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Join {
    pub table: String,
    pub left: ColumnRef,
    pub right: ColumnRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinUnit {
    Year,
    Month,
    Weekday,
    Day,
    Interval(f64),
}

impl BinUnit {
    pub fn is_time(self) -> bool {
        !matches!(self, BinUnit::Interval(_))
    }
}

impl Eq for BinUnit {}

impl std::hash::Hash for BinUnit {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        if let BinUnit::Interval(n) = self {
            n.to_bits().hash(state);
        }
    }
}

impl PartialOrd for BinUnit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BinUnit {
    fn cmp(&self, other: &Self) -> Ordering {
        fn rank(u: &BinUnit) -> u8 {
            match u {
                BinUnit::Year => 0,
                BinUnit::Month => 1,
                BinUnit::Weekday => 2,
                BinUnit::Day => 3,
                BinUnit::Interval(_) => 4,
            }
        }
        match (self, other) {
            (BinUnit::Interval(a), BinUnit::Interval(b)) => a.total_cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl fmt::Display for BinUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinUnit::Year => f.write_str("YEAR"),
            BinUnit::Month => f.write_str("MONTH"),
            BinUnit::Weekday => f.write_str("WEEKDAY"),
            BinUnit::Day => f.write_str("DAY"),
            BinUnit::Interval(n) => write!(f, "INTERVAL {}", n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinSpec {
    pub column: ColumnRef,
    pub unit: BinUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "ASC")]
    Asc,
    #[serde(rename = "DESC")]
    Desc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderSpec {
    pub target: Axis,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VqlQuery {
    pub chart: ChartType,
    pub x: ColumnRef,
    pub y: YChannel,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub color: Option<ColumnRef>,
    pub from_table: String,
    #[serde(default)]
    pub joins: Vec<Join>,
    #[serde(default)]
    pub filters: Vec<Predicate>,
    #[serde(default)]
    pub group_by: Vec<ColumnRef>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bin: Option<BinSpec>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub order: Option<OrderSpec>,
}

impl VqlQuery {
    /// Every column reference in the query, in clause order.
    pub fn column_refs(&self) -> Vec<&ColumnRef> {
        let mut out = vec![&self.x];
        if let Some(c) = self.y.arg.column() {
            out.push(c);
        }
        out.extend(self.color.iter());
        for j in &self.joins {
            out.push(&j.left);
            out.push(&j.right);
        }
        out.extend(self.filters.iter().map(|p| &p.column));
        out.extend(self.group_by.iter());
        out.extend(self.bin.iter().map(|b| &b.column));
        out
    }

    /// Tables the query reads, FROM first then joins in order.
    pub fn tables(&self) -> Vec<&str> {
        std::iter::once(self.from_table.as_str())
            .chain(self.joins.iter().map(|j| j.table.as_str()))
            .collect()
    }
}
