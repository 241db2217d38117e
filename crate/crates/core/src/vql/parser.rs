//! Recursive-descent parser for VQL.
//!
//! Keywords are matched case-insensitively and only where the grammar allows
//! them, so an identifier may spell a keyword (`year`, `count`) without
//! ambiguity. On failure the parser reports the furthest position it reached
//! together with everything it would have accepted there.

use std::collections::BTreeSet;

use super::ast::*;
use super::error::VqlError;
use super::lexer::{tokenize, Token, TokenKind};

pub fn parse_vql(text: &str) -> Result<VqlQuery, VqlError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        furthest: 0,
        expected: BTreeSet::new(),
    };
    let query = parser.query()?;
    validate_structure(&query)?;
    Ok(query)
}

/// Parse raw bytes; invalid UTF-8 is a syntax error at the first bad byte.
pub fn parse_vql_bytes(bytes: &[u8]) -> Result<VqlQuery, VqlError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_vql(text),
        Err(e) => Err(VqlError::Syntax {
            position: e.valid_up_to(),
            expected: vec!["UTF-8 text".into()],
            found: "invalid byte".into(),
        }),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    furthest: usize,
    expected: BTreeSet<String>,
}

type PResult<T> = Result<T, VqlError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset)
    }

    fn note(&mut self, what: &str) {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
        }
        if self.pos == self.furthest {
            self.expected.insert(what.to_string());
        }
    }

    fn error(&mut self) -> VqlError {
        let (position, found) = match self.tokens.get(self.furthest) {
            Some(t) => (t.pos, t.describe()),
            None => (self.end, "end of input".to_string()),
        };
        VqlError::Syntax {
            position,
            expected: self.expected.iter().cloned().collect(),
            found,
        }
    }

    fn at_keyword(&mut self, kw: &str) -> bool {
        let hit = matches!(self.peek(), Some(Token { kind: TokenKind::Word(w), .. }) if w.eq_ignore_ascii_case(kw));
        if !hit {
            self.note(kw);
        }
        hit
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn eat(&mut self, kind: &TokenKind, label: &str) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            self.note(label);
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind, label: &str) -> PResult<()> {
        if self.eat(kind, label) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn ident(&mut self) -> PResult<String> {
        if let Some(Token {
            kind: TokenKind::Word(w),
            ..
        }) = self.peek()
        {
            let w = w.clone();
            self.pos += 1;
            Ok(w)
        } else {
            self.note("identifier");
            Err(self.error())
        }
    }

    fn colref(&mut self) -> PResult<ColumnRef> {
        let first = self.ident()?;
        if self.eat(&TokenKind::Dot, ".") {
            let second = self.ident()?;
            Ok(ColumnRef::qualified(first, second))
        } else {
            Ok(ColumnRef::new(first))
        }
    }

    fn query(&mut self) -> PResult<VqlQuery> {
        self.expect_keyword("Visualize")?;
        let chart = self.chart()?;
        self.expect_keyword("SELECT")?;
        let x = self.x_channel()?;
        self.expect(&TokenKind::Comma, ",")?;
        let y = self.y_channel()?;
        let mut color = None;
        if self.eat(&TokenKind::Comma, ",") {
            self.expect_keyword("COLOR")?;
            color = Some(self.colref()?);
        }
        self.expect_keyword("FROM")?;
        let from_table = self.ident()?;

        let mut joins = Vec::new();
        while self.eat_keyword("JOIN") {
            let table = self.ident()?;
            self.expect_keyword("ON")?;
            let left = self.colref()?;
            self.expect(&TokenKind::Op("="), "=")?;
            let right = self.colref()?;
            joins.push(Join { table, left, right });
        }

        let mut filters = Vec::new();
        if self.eat_keyword("WHERE") {
            filters.push(self.predicate()?);
            while self.eat_keyword("AND") {
                filters.push(self.predicate()?);
            }
        }

        let mut group_by = Vec::new();
        if self.eat_keyword("GROUP") {
            self.expect_keyword("BY")?;
            group_by.push(self.colref()?);
            while self.eat(&TokenKind::Comma, ",") {
                group_by.push(self.colref()?);
            }
        }

        let mut bin = None;
        if self.eat_keyword("BIN") {
            let column = self.colref()?;
            self.expect_keyword("BY")?;
            let unit = self.bin_unit()?;
            bin = Some(BinSpec { column, unit });
        }

        let mut order = None;
        if self.eat_keyword("ORDER") {
            self.expect_keyword("BY")?;
            let target = if self.eat_keyword("X") {
                Axis::X
            } else if self.eat_keyword("Y") {
                Axis::Y
            } else {
                return Err(self.error());
            };
            let direction = if self.eat_keyword("ASC") {
                Direction::Asc
            } else if self.eat_keyword("DESC") {
                Direction::Desc
            } else {
                return Err(self.error());
            };
            order = Some(OrderSpec { target, direction });
        }

        if self.peek().is_some() {
            self.note("end of input");
            return Err(self.error());
        }

        Ok(VqlQuery {
            chart,
            x,
            y,
            color,
            from_table,
            joins,
            filters,
            group_by,
            bin,
            order,
        })
    }

    fn chart(&mut self) -> PResult<ChartType> {
        if self.eat_keyword("BAR") {
            Ok(ChartType::Bar)
        } else if self.eat_keyword("PIE") {
            Ok(ChartType::Pie)
        } else if self.eat_keyword("LINE") {
            Ok(ChartType::Line)
        } else if self.eat_keyword("SCATTER") {
            Ok(ChartType::Scatter)
        } else if self.eat_keyword("STACKED") {
            self.expect_keyword("BAR")?;
            Ok(ChartType::StackedBar)
        } else if self.eat_keyword("GROUPED") {
            if self.eat_keyword("LINE") {
                Ok(ChartType::GroupedLine)
            } else if self.eat_keyword("SCATTER") {
                Ok(ChartType::GroupedScatter)
            } else {
                Err(self.error())
            }
        } else {
            Err(self.error())
        }
    }

    fn aggregate_ahead(&mut self) -> Option<AggFn> {
        let agg = match self.peek() {
            Some(Token {
                kind: TokenKind::Word(w),
                ..
            }) => AggFn::from_keyword(w),
            _ => None,
        };
        let paren = matches!(
            self.peek_at(1),
            Some(Token {
                kind: TokenKind::LParen,
                ..
            })
        );
        if agg.is_some() && paren {
            agg
        } else {
            self.note("aggregate");
            None
        }
    }

    fn x_channel(&mut self) -> PResult<ColumnRef> {
        if self.aggregate_ahead().is_some() {
            return Err(VqlError::semantic(
                "the x channel must be a plain column, not an aggregate",
            ));
        }
        self.colref()
    }

    fn y_channel(&mut self) -> PResult<YChannel> {
        if let Some(agg) = self.aggregate_ahead() {
            self.pos += 2;
            let arg = if self.eat(&TokenKind::Star, "*") {
                YArg::Star
            } else {
                YArg::Column(self.colref()?)
            };
            self.expect(&TokenKind::RParen, ")")?;
            Ok(YChannel { agg, arg })
        } else {
            Ok(YChannel {
                agg: AggFn::None,
                arg: YArg::Column(self.colref()?),
            })
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        match self.peek().map(|t| t.kind.clone()) {
            Some(TokenKind::Number(n)) => {
                self.pos += 1;
                Ok(Literal::Number(n))
            }
            Some(TokenKind::Str(s)) => {
                self.pos += 1;
                Ok(Literal::String(s))
            }
            _ => {
                self.note("literal");
                Err(self.error())
            }
        }
    }

    fn predicate(&mut self) -> PResult<Predicate> {
        let column = self.colref()?;
        let cond = if let Some(Token {
            kind: TokenKind::Op(op),
            ..
        }) = self.peek()
        {
            let op = match *op {
                "=" => CmpOp::Eq,
                "!=" => CmpOp::Ne,
                "<" => CmpOp::Lt,
                "<=" => CmpOp::Le,
                ">" => CmpOp::Gt,
                _ => CmpOp::Ge,
            };
            self.pos += 1;
            Condition::Compare {
                op,
                value: self.literal()?,
            }
        } else {
            self.note("comparison operator");
            if self.eat_keyword("BETWEEN") {
                let low = self.literal()?;
                self.expect_keyword("AND")?;
                let high = self.literal()?;
                Condition::Between { low, high }
            } else if self.eat_keyword("IN") {
                self.expect(&TokenKind::LParen, "(")?;
                let mut values = vec![self.literal()?];
                while self.eat(&TokenKind::Comma, ",") {
                    values.push(self.literal()?);
                }
                self.expect(&TokenKind::RParen, ")")?;
                Condition::In { values }
            } else if self.eat_keyword("LIKE") {
                match self.peek().map(|t| t.kind.clone()) {
                    Some(TokenKind::Str(s)) => {
                        self.pos += 1;
                        Condition::Like { pattern: s }
                    }
                    _ => {
                        self.note("string");
                        return Err(self.error());
                    }
                }
            } else {
                return Err(self.error());
            }
        };
        Ok(Predicate { column, cond })
    }

    fn bin_unit(&mut self) -> PResult<BinUnit> {
        if self.eat_keyword("YEAR") {
            Ok(BinUnit::Year)
        } else if self.eat_keyword("MONTH") {
            Ok(BinUnit::Month)
        } else if self.eat_keyword("WEEKDAY") {
            Ok(BinUnit::Weekday)
        } else if self.eat_keyword("DAY") {
            Ok(BinUnit::Day)
        } else if self.eat_keyword("INTERVAL") {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Number(n)) => {
                    self.pos += 1;
                    Ok(BinUnit::Interval(n))
                }
                _ => {
                    self.note("number");
                    Err(self.error())
                }
            }
        } else {
            Err(self.error())
        }
    }
}

/// Columns that name the same thing as far as can be told without a schema:
/// same column name, and same table whenever both sides are qualified.
pub(crate) fn loosely_same(a: &ColumnRef, b: &ColumnRef) -> bool {
    let tables_agree = match (&a.table, &b.table) {
        (Some(x), Some(y)) => x.eq_ignore_ascii_case(y),
        _ => true,
    };
    tables_agree && a.column.eq_ignore_ascii_case(&b.column)
}

/// Check every query invariant that does not need a schema.
pub fn validate_structure(q: &VqlQuery) -> Result<(), VqlError> {
    validate_with(q, loosely_same)
}

pub(crate) fn validate_with(
    q: &VqlQuery,
    same: impl Fn(&ColumnRef, &ColumnRef) -> bool,
) -> Result<(), VqlError> {
    match (q.chart.needs_color(), &q.color) {
        (true, None) => {
            return Err(VqlError::semantic(format!(
                "{} requires a color channel",
                q.chart
            )))
        }
        (false, Some(_)) => {
            return Err(VqlError::semantic(format!(
                "{} does not take a color channel",
                q.chart
            )))
        }
        _ => {}
    }

    match (&q.y.agg, &q.y.arg) {
        (AggFn::None, YArg::Star) => return Err(VqlError::semantic("bare * in the y channel")),
        (AggFn::Sum | AggFn::Avg | AggFn::Min | AggFn::Max, YArg::Star) => {
            return Err(VqlError::semantic("only COUNT accepts *"))
        }
        _ => {}
    }

    let tables = q.tables();
    for (i, t) in tables.iter().enumerate() {
        if tables[..i].iter().any(|u| u.eq_ignore_ascii_case(t)) {
            return Err(VqlError::semantic(format!("table {t} appears twice")));
        }
    }

    for p in &q.filters {
        match &p.cond {
            Condition::Between { low, high } => {
                if let (Some(a), Some(b)) = (low.as_number(), high.as_number()) {
                    if a > b {
                        return Err(VqlError::semantic(format!(
                            "BETWEEN bounds out of order: {a} > {b}"
                        )));
                    }
                }
            }
            Condition::In { values } if values.is_empty() => {
                return Err(VqlError::semantic("IN needs at least one value"))
            }
            _ => {}
        }
    }

    if let Some(bin) = &q.bin {
        if let BinUnit::Interval(n) = bin.unit {
            if !(n > 0.0 && n.is_finite()) {
                return Err(VqlError::semantic("INTERVAL width must be positive"));
            }
        }
        if !same(&bin.column, &q.x) {
            return Err(VqlError::semantic("BIN must apply to the x column"));
        }
        if q.group_by.iter().any(|g| same(g, &bin.column)) {
            return Err(VqlError::semantic(
                "a column cannot be both binned and grouped",
            ));
        }
    }

    if q.y.agg == AggFn::None {
        if !q.group_by.is_empty() {
            return Err(VqlError::semantic(
                "GROUP BY requires an aggregated y channel",
            ));
        }
    } else {
        let x_keyed = q.group_by.iter().any(|g| same(g, &q.x)) || q.bin.is_some();
        if !x_keyed {
            return Err(VqlError::semantic(
                "an aggregated y channel needs the x column in GROUP BY or BIN",
            ));
        }
        if let Some(color) = &q.color {
            if !q.group_by.iter().any(|g| same(g, color)) {
                return Err(VqlError::semantic(
                    "an aggregated y channel needs the color column in GROUP BY",
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MOVIE: &str = "Visualize BAR SELECT name , COUNT(name) FROM movies WHERE stars BETWEEN 3 AND 5 GROUP BY name ORDER BY X DESC";

    #[test]
    fn parses_movie_query() {
        let q = parse_vql(MOVIE).unwrap();
        assert_eq!(q.chart, ChartType::Bar);
        assert_eq!(q.x, ColumnRef::new("name"));
        assert_eq!(
            q.y,
            YChannel {
                agg: AggFn::Count,
                arg: YArg::Column(ColumnRef::new("name"))
            }
        );
        assert_eq!(q.from_table, "movies");
        assert_eq!(
            q.filters,
            vec![Predicate {
                column: ColumnRef::new("stars"),
                cond: Condition::Between {
                    low: Literal::Number(3.0),
                    high: Literal::Number(5.0)
                }
            }]
        );
        assert_eq!(q.group_by, vec![ColumnRef::new("name")]);
        assert_eq!(
            q.order,
            Some(OrderSpec {
                target: Axis::X,
                direction: Direction::Desc
            })
        );
        assert!(q.color.is_none() && q.bin.is_none() && q.joins.is_empty());
    }

    #[test]
    fn keywords_are_case_insensitive() {
        assert_eq!(
            parse_vql(&MOVIE.to_lowercase()).unwrap(),
            parse_vql(MOVIE).unwrap()
        );
    }

    #[test]
    fn trailing_token_is_syntax_error() {
        let text = "Visualize PIE SELECT c , COUNT(*) FROM t GROUP BY c EXTRA";
        match parse_vql(text).unwrap_err() {
            VqlError::Syntax {
                position,
                expected,
                found,
            } => {
                assert_eq!(position, text.find("EXTRA").unwrap());
                assert_eq!(found, "EXTRA");
                assert!(expected.contains(&"end of input".to_string()));
                assert!(expected.contains(&"ORDER".to_string()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stacked_bar_without_color_is_semantic_error() {
        let err = parse_vql("Visualize STACKED BAR SELECT x , SUM(v) FROM t GROUP BY x").unwrap_err();
        assert!(matches!(err, VqlError::Semantic(ref m) if m.contains("STACKED BAR requires")));
    }

    #[test]
    fn identifiers_may_spell_keywords() {
        let q = parse_vql("Visualize LINE SELECT year , COUNT(year) FROM count BIN year BY YEAR").unwrap();
        assert_eq!(q.from_table, "count");
        assert_eq!(q.bin.unwrap().unit, BinUnit::Year);
    }

    #[test]
    fn invariant_violations_are_rejected() {
        let cases = [
            "Visualize BAR SELECT a , COUNT(a) FROM t",
            "Visualize BAR SELECT a , b FROM t GROUP BY a",
            "Visualize BAR SELECT a , SUM(*) FROM t GROUP BY a",
            "Visualize PIE SELECT a , COUNT(a) , COLOR c FROM t GROUP BY a , c",
            "Visualize BAR SELECT a , b FROM t WHERE b BETWEEN 5 AND 3",
            "Visualize LINE SELECT a , COUNT(a) FROM t GROUP BY a BIN a BY MONTH",
            "Visualize LINE SELECT a , COUNT(a) FROM t BIN b BY MONTH",
            "Visualize BAR SELECT a , b FROM t JOIN t ON t.a = t.b",
            "Visualize BAR SELECT COUNT(a) , b FROM t",
            "Visualize GROUPED LINE SELECT a , COUNT(a) , COLOR c FROM t GROUP BY a",
        ];
        for text in cases {
            assert!(
                matches!(parse_vql(text), Err(VqlError::Semantic(_))),
                "accepted {text}"
            );
        }
    }

    #[test]
    fn syntax_errors_carry_expected_sets() {
        match parse_vql("Visualize DONUT SELECT a , b FROM t").unwrap_err() {
            VqlError::Syntax { expected, found, .. } => {
                assert_eq!(found, "DONUT");
                for kw in ["BAR", "PIE", "LINE", "SCATTER", "STACKED", "GROUPED"] {
                    assert!(expected.contains(&kw.to_string()), "{expected:?}");
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_vql("Visualize BAR SELECT a ,").unwrap_err(),
            VqlError::Syntax { found, .. } if found == "end of input"
        ));
    }

    #[test]
    fn invalid_utf8_is_reported() {
        assert!(matches!(
            parse_vql_bytes(b"Visualize \xff"),
            Err(VqlError::Syntax { position: 10, .. })
        ));
    }
}
