use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use t2v_core::compiler::{Cell, Database, Relation, Timestamp};
use t2v_core::dataset::{ColumnDef, DType, DatabaseSchema, ForeignKey, TableDef};
use t2v_core::vql::{
    canonicalize, AggFn, Axis, BinSpec, BinUnit, ChartType, CmpOp, ColumnRef, Condition,
    Direction, Join, Literal, OrderSpec, Predicate, VqlQuery, YArg, YChannel,
};

#[derive(Debug, Clone, Copy)]
pub struct InstanceConfig {
    pub max_tables: usize,
    pub max_rows: usize,
    pub null_rate: f64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            max_tables: 3,
            max_rows: 8,
            null_rate: 0.15,
        }
    }
}

/// A schema, its data and one canonical query over it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub schema: DatabaseSchema,
    pub db: Database,
    pub query: VqlQuery,
}

const TABLES: [&str; 3] = ["alpha", "beta", "gamma"];
const COLUMNS: [&str; 5] = ["a", "b", "c", "d", "e"];
const TEXTS: [&str; 5] = ["a", "b", "ab", "ba", "c"];
const LIKES: [&str; 6] = ["%a%", "a%", "_", "%", "b_", "%b"];

fn number<R: Rng>(rng: &mut R) -> f64 {
    // Halves keep sums exact in any order.
    rng.random_range(-6i32..=6) as f64 / 2.0
}

fn time<R: Rng>(rng: &mut R) -> Timestamp {
    let year = rng.random_range(2019..=2021);
    let month = rng.random_range(1..=12);
    let day = rng.random_range(1..=28);
    let hour = if rng.random_bool(0.3) {
        rng.random_range(0..24)
    } else {
        0
    };
    Timestamp::new(year, month, day, hour, 0, 0).expect("valid generated time")
}

fn cell<R: Rng>(rng: &mut R, dtype: DType, null_rate: f64) -> Cell {
    if rng.random_bool(null_rate) {
        return Cell::Null;
    }
    match dtype {
        DType::Number => Cell::Number(number(rng)),
        DType::Text => Cell::Text(TEXTS.choose(rng).unwrap().to_string()),
        DType::Time => Cell::Time(time(rng)),
    }
}

fn literal<R: Rng>(rng: &mut R, dtype: DType) -> Literal {
    match dtype {
        DType::Number => Literal::Number(number(rng)),
        DType::Text => Literal::String(TEXTS.choose(rng).unwrap().to_string()),
        DType::Time => Literal::String(time(rng).to_string()),
    }
}

fn schema_and_data<R: Rng>(rng: &mut R, cfg: &InstanceConfig) -> (DatabaseSchema, Database) {
    let n_tables = rng.random_range(1..=cfg.max_tables.clamp(1, TABLES.len()));
    let mut tables = Vec::new();
    let mut db = Database::new();
    for name in &TABLES[..n_tables] {
        let mut columns = vec![ColumnDef {
            name: "k".into(),
            dtype: DType::Number,
        }];
        let mut names = COLUMNS.to_vec();
        names.shuffle(rng);
        for col in names.iter().take(rng.random_range(1..=3)) {
            let dtype = *[DType::Number, DType::Text, DType::Time].choose(rng).unwrap();
            columns.push(ColumnDef {
                name: col.to_string(),
                dtype,
            });
        }
        let mut rel = Relation::new(columns.iter().map(|c| (c.name.clone(), c.dtype)).collect());
        for _ in 0..rng.random_range(0..=cfg.max_rows) {
            let row = columns
                .iter()
                .map(|c| {
                    if c.name == "k" {
                        if rng.random_bool(cfg.null_rate / 2.0) {
                            Cell::Null
                        } else {
                            Cell::Number(rng.random_range(0..3) as f64)
                        }
                    } else {
                        cell(rng, c.dtype, cfg.null_rate)
                    }
                })
                .collect();
            rel.rows.push(row);
        }
        db.insert(name.to_string(), rel);
        let foreign_keys = if tables.is_empty() {
            vec![]
        } else {
            vec![ForeignKey("k".into(), TABLES[0].into(), "k".into())]
        };
        tables.push(TableDef {
            name: name.to_string(),
            columns,
            primary_key: None,
            foreign_keys,
        });
    }
    (
        DatabaseSchema {
            db_id: "random".into(),
            tables,
        },
        db,
    )
}

fn predicate<R: Rng>(rng: &mut R, column: ColumnRef, dtype: DType) -> Predicate {
    let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
    let cond = match (dtype, rng.random_range(0..4)) {
        (DType::Text, 3) => Condition::Like {
            pattern: LIKES.choose(rng).unwrap().to_string(),
        },
        (DType::Number, 1) => {
            let (a, b) = (number(rng), number(rng));
            Condition::Between {
                low: Literal::Number(a.min(b)),
                high: Literal::Number(a.max(b)),
            }
        }
        (DType::Time, 1) => {
            let (a, b) = (time(rng), time(rng));
            Condition::Between {
                low: Literal::String(a.min(b).to_string()),
                high: Literal::String(a.max(b).to_string()),
            }
        }
        (_, 2) => Condition::In {
            values: (0..rng.random_range(1..=3)).map(|_| literal(rng, dtype)).collect(),
        },
        _ => Condition::Compare {
            op: *ops.choose(rng).unwrap(),
            value: literal(rng, dtype),
        },
    };
    Predicate { column, cond }
}

fn random_query<R: Rng>(rng: &mut R, schema: &DatabaseSchema) -> VqlQuery {
    let n = schema.tables.len();
    let used = rng.random_range(1..=n);
    let from_table = schema.tables[0].name.clone();
    let mut joins = Vec::new();
    for i in 1..used {
        let j = rng.random_range(0..i);
        joins.push(Join {
            table: schema.tables[i].name.clone(),
            left: ColumnRef::qualified(&schema.tables[i].name, "k"),
            right: ColumnRef::qualified(&schema.tables[j].name, "k"),
        });
    }
    let columns: Vec<(ColumnRef, DType)> = schema.tables[..used]
        .iter()
        .flat_map(|t| {
            t.columns
                .iter()
                .map(|c| (ColumnRef::qualified(&t.name, &c.name), c.dtype))
        })
        .collect();

    let chart = *ChartType::ALL.choose(rng).unwrap();
    let (x, x_type) = columns.choose(rng).unwrap().clone();
    let bin = if x_type != DType::Text && rng.random_bool(0.35) {
        let unit = if x_type == DType::Time {
            *[BinUnit::Year, BinUnit::Month, BinUnit::Weekday, BinUnit::Day]
                .choose(rng)
                .unwrap()
        } else {
            *[BinUnit::Interval(0.5), BinUnit::Interval(1.0), BinUnit::Interval(2.0)]
                .choose(rng)
                .unwrap()
        };
        Some(BinSpec {
            column: x.clone(),
            unit,
        })
    } else {
        None
    };
    let color = if chart.needs_color() {
        let others: Vec<_> = columns.iter().filter(|(c, _)| *c != x).collect();
        Some(
            others
                .choose(rng)
                .map(|(c, _)| c.clone())
                .unwrap_or_else(|| x.clone()),
        )
    } else {
        None
    };

    let aggregated = bin.is_some() && rng.random_bool(0.8) || rng.random_bool(0.6);
    let y = if aggregated {
        let numeric: Vec<_> = columns.iter().filter(|(_, t)| *t == DType::Number).collect();
        match rng.random_range(0..4) {
            0 => YChannel {
                agg: AggFn::Count,
                arg: YArg::Star,
            },
            1 => YChannel {
                agg: *[AggFn::Sum, AggFn::Avg].choose(rng).unwrap(),
                arg: YArg::Column(numeric.choose(rng).unwrap().0.clone()),
            },
            2 => YChannel {
                agg: *[AggFn::Min, AggFn::Max].choose(rng).unwrap(),
                arg: YArg::Column(columns.choose(rng).unwrap().0.clone()),
            },
            _ => YChannel {
                agg: AggFn::Count,
                arg: YArg::Column(columns.choose(rng).unwrap().0.clone()),
            },
        }
    } else {
        YChannel {
            agg: AggFn::None,
            arg: YArg::Column(columns.choose(rng).unwrap().0.clone()),
        }
    };

    let mut group_by = Vec::new();
    if aggregated {
        if bin.is_none() {
            group_by.push(x.clone());
        }
        if let Some(c) = &color {
            if bin.is_none() || *c != x {
                group_by.push(c.clone());
            }
        }
        if rng.random_bool(0.2) {
            let extra = columns.choose(rng).unwrap().0.clone();
            if bin.is_none() || extra != x {
                group_by.push(extra);
            }
        }
    }

    let filters = (0..rng.random_range(0..=2))
        .map(|_| {
            let (c, t) = columns.choose(rng).unwrap().clone();
            predicate(rng, c, t)
        })
        .collect();

    let order = rng.random_bool(0.4).then(|| OrderSpec {
        target: *[Axis::X, Axis::Y].choose(rng).unwrap(),
        direction: *[Direction::Asc, Direction::Desc].choose(rng).unwrap(),
    });

    VqlQuery {
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
    }
}

/// A random schema (≤ `max_tables` tables joined on `k`), data of at most
/// `max_rows` rows per table, and a canonical query. Retries until the
/// generated query is valid for its schema.
pub fn random_instance<R: Rng>(rng: &mut R, cfg: &InstanceConfig) -> Instance {
    loop {
        let (schema, db) = schema_and_data(rng, cfg);
        for _ in 0..20 {
            let q = random_query(rng, &schema);
            if let Ok(query) = canonicalize(&q, &schema) {
                return Instance { schema, db, query };
            }
        }
    }
}

fn recase<R: Rng>(rng: &mut R, s: &str) -> String {
    s.chars()
        .map(|ch| {
            if rng.random_bool(0.5) {
                ch.to_ascii_uppercase()
            } else {
                ch
            }
        })
        .collect()
}

/// Same query written differently: shuffled conjuncts and group keys,
/// swapped join sides, mixed case and unqualified columns where unambiguous.
pub fn respell<R: Rng>(rng: &mut R, q: &VqlQuery, schema: &DatabaseSchema) -> VqlQuery {
    let tables: Vec<String> = q.tables().iter().map(|t| t.to_string()).collect();
    let col = |rng: &mut R, c: &ColumnRef| -> ColumnRef {
        let owners = tables
            .iter()
            .filter(|t| schema.dtype(t, &c.column).is_some())
            .count();
        let keep_table = owners != 1 || rng.random_bool(0.5);
        ColumnRef {
            table: match (&c.table, keep_table) {
                (Some(t), true) => Some(recase(rng, t)),
                _ => None,
            },
            column: recase(rng, &c.column),
        }
    };
    let qualified = |rng: &mut R, c: &ColumnRef| ColumnRef {
        table: c.table.as_deref().map(|t| recase(rng, t)),
        column: recase(rng, &c.column),
    };
    let mut out = q.clone();
    out.x = col(rng, &q.x);
    if let YArg::Column(c) = &q.y.arg {
        out.y.arg = YArg::Column(col(rng, c));
    }
    out.color = q.color.as_ref().map(|c| col(rng, c));
    out.from_table = recase(rng, &q.from_table);
    out.joins = q
        .joins
        .iter()
        .map(|j| {
            let (l, r) = if rng.random_bool(0.5) {
                (&j.right, &j.left)
            } else {
                (&j.left, &j.right)
            };
            Join {
                table: recase(rng, &j.table),
                left: qualified(rng, l),
                right: qualified(rng, r),
            }
        })
        .collect();
    out.filters = q
        .filters
        .iter()
        .map(|p| Predicate {
            column: col(rng, &p.column),
            cond: match &p.cond {
                Condition::In { values } => {
                    let mut values = values.clone();
                    values.reverse();
                    Condition::In { values }
                }
                other => other.clone(),
            },
        })
        .collect();
    out.filters.shuffle(rng);
    if !out.filters.is_empty() && rng.random_bool(0.3) {
        let dup = out.filters[0].clone();
        out.filters.push(dup);
    }
    out.group_by = q.group_by.iter().map(|c| col(rng, c)).collect();
    out.group_by.shuffle(rng);
    out.bin = q.bin.as_ref().map(|b| BinSpec {
        column: col(rng, &b.column),
        unit: b.unit,
    });
    out
}

/// Which part of a query a mutation touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Chart,
    Axis,
    Where,
    Bin,
    Order,
}

/// Change one component of a canonical query. The result may not be valid
/// for the schema; callers canonicalize and skip failures.
pub fn mutate<R: Rng>(rng: &mut R, q: &VqlQuery, schema: &DatabaseSchema) -> (VqlQuery, Mutation) {
    let mut out = q.clone();
    let kinds = [
        Mutation::Chart,
        Mutation::Axis,
        Mutation::Where,
        Mutation::Bin,
        Mutation::Order,
    ];
    let kind = *kinds.choose(rng).unwrap();
    match kind {
        Mutation::Chart => {
            let same_color: Vec<ChartType> = ChartType::ALL
                .into_iter()
                .filter(|c| c.needs_color() == q.chart.needs_color() && *c != q.chart)
                .collect();
            out.chart = *same_color.choose(rng).unwrap();
        }
        Mutation::Axis => {
            let agg = [AggFn::Count, AggFn::Sum, AggFn::Avg, AggFn::Min, AggFn::Max];
            if q.y.agg != AggFn::None {
                out.y.agg = *agg.iter().filter(|a| **a != q.y.agg).collect::<Vec<_>>().choose(rng).unwrap().to_owned();
                if out.y.agg != AggFn::Count && out.y.arg == YArg::Star {
                    let numeric: Vec<ColumnRef> = q
                        .tables()
                        .iter()
                        .flat_map(|t| {
                            let def = schema.table(t).unwrap();
                            def.columns
                                .iter()
                                .filter(|c| c.dtype == DType::Number)
                                .map(|c| ColumnRef::qualified(def.name.to_ascii_lowercase(), c.name.to_ascii_lowercase()))
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    out.y.arg = YArg::Column(numeric.choose(rng).unwrap().clone());
                }
            } else {
                let cols: Vec<ColumnRef> = q
                    .tables()
                    .iter()
                    .flat_map(|t| {
                        let def = schema.table(t).unwrap();
                        def.columns
                            .iter()
                            .map(|c| ColumnRef::qualified(def.name.to_ascii_lowercase(), c.name.to_ascii_lowercase()))
                            .collect::<Vec<_>>()
                    })
                    .filter(|c| YArg::Column(c.clone()) != q.y.arg)
                    .collect();
                if let Some(c) = cols.choose(rng) {
                    out.y.arg = YArg::Column(c.clone());
                }
            }
        }
        Mutation::Where => {
            if out.filters.is_empty() || rng.random_bool(0.3) {
                let c = q.x.clone();
                let dtype = schema
                    .dtype(c.table.as_deref().unwrap_or_default(), &c.column)
                    .unwrap_or(DType::Text);
                out.filters.push(Predicate {
                    column: c,
                    cond: Condition::Compare {
                        op: CmpOp::Ne,
                        value: match dtype {
                            DType::Number => Literal::Number(99.5),
                            _ => Literal::String("zz".into()),
                        },
                    },
                });
                if dtype == DType::Time {
                    out.filters.pop();
                    out.filters.push(Predicate {
                        column: q.x.clone(),
                        cond: Condition::Compare {
                            op: CmpOp::Ne,
                            value: Literal::String("1999-01-01".into()),
                        },
                    });
                }
            } else {
                let i = rng.random_range(0..out.filters.len());
                out.filters.remove(i);
            }
        }
        Mutation::Bin => match &q.bin {
            Some(b) => {
                let next = match b.unit {
                    BinUnit::Year => BinUnit::Month,
                    BinUnit::Month => BinUnit::Weekday,
                    BinUnit::Weekday => BinUnit::Day,
                    BinUnit::Day => BinUnit::Year,
                    BinUnit::Interval(n) => BinUnit::Interval(n * 2.0),
                };
                out.bin = Some(BinSpec {
                    column: b.column.clone(),
                    unit: next,
                });
            }
            None => {
                out.order = match q.order {
                    Some(_) => None,
                    None => Some(OrderSpec {
                        target: Axis::X,
                        direction: Direction::Asc,
                    }),
                };
                return (out, Mutation::Order);
            }
        },
        Mutation::Order => {
            out.order = match q.order {
                None => Some(OrderSpec {
                    target: Axis::Y,
                    direction: Direction::Desc,
                }),
                Some(o) => Some(OrderSpec {
                    target: o.target,
                    direction: match o.direction {
                        Direction::Asc => Direction::Desc,
                        Direction::Desc => Direction::Asc,
                    },
                }),
            };
        }
    }
    (out, kind)
}
