//! Templated Chinese questions paired with VQL over given schemas.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use t2v_core::dataset::{DType, DatabaseSchema, Hardness, Sample, SchemaSet, TableDef};
use t2v_core::vql::{canonicalize, parse_vql, AggFn, ChartType, CmpOp, Literal};

/// Chinese renderings of whole identifiers, checked before word pieces.
const WHOLE: &[(&str, &str)] = &[
    ("first_name", "名字"),
    ("last_name", "姓氏"),
    ("hire_date", "入职日期"),
    ("birth_date", "出生日期"),
];

const PIECES: &[(&str, &str)] = &[
    ("age", "年龄"),
    ("amount", "金额"),
    ("author", "作者"),
    ("book", "书籍"),
    ("city", "城市"),
    ("code", "代码"),
    ("count", "计数"),
    ("country", "国家"),
    ("date", "日期"),
    ("day", "日子"),
    ("department", "部门"),
    ("departments", "部门"),
    ("description", "描述"),
    ("employee", "员工"),
    ("employees", "员工"),
    ("fault", "故障"),
    ("genre", "类型"),
    ("height", "身高"),
    ("id", "编号"),
    ("log", "日志"),
    ("manager", "经理"),
    ("movie", "电影"),
    ("movies", "电影"),
    ("name", "名称"),
    ("price", "价格"),
    ("quarter", "季度"),
    ("rating", "评级"),
    ("region", "地区"),
    ("released", "上映日期"),
    ("salary", "工资"),
    ("sales", "销售"),
    ("score", "分数"),
    ("stars", "星级"),
    ("status", "状态"),
    ("title", "标题"),
    ("type", "种类"),
    ("units", "销量"),
    ("weight", "体重"),
    ("year", "年份"),
];

/// Chinese gloss of an identifier; unknown pieces stay in English.
pub fn gloss(ident: &str) -> String {
    let lower = ident.to_ascii_lowercase();
    if let Some((_, g)) = WHOLE.iter().find(|(w, _)| *w == lower) {
        return g.to_string();
    }
    lower
        .split('_')
        .filter(|p| !p.is_empty())
        .map(|p| PIECES.iter().find(|(w, _)| *w == p).map_or(p.to_string(), |(_, g)| g.to_string()))
        .collect()
}

fn chart_phrase(c: ChartType) -> &'static str {
    match c {
        ChartType::Bar => "柱状图",
        ChartType::Pie => "饼图",
        ChartType::Line => "折线图",
        ChartType::Scatter => "散点图",
        ChartType::StackedBar => "堆叠柱状图",
        ChartType::GroupedLine => "分组折线图",
        ChartType::GroupedScatter => "分组散点图",
    }
}

fn agg_phrase(a: AggFn) -> &'static str {
    match a {
        AggFn::Sum => "总",
        AggFn::Avg => "平均",
        AggFn::Min => "最小",
        AggFn::Max => "最大",
        AggFn::Count | AggFn::None => "",
    }
}

fn op_phrase(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "等于",
        CmpOp::Ne => "不等于",
        CmpOp::Lt => "小于",
        CmpOp::Le => "不超过",
        CmpOp::Gt => "大于",
        CmpOp::Ge => "不少于",
    }
}

struct Col<'a> {
    table: &'a TableDef,
    name: &'a str,
    dtype: DType,
    gloss: String,
}

impl Col<'_> {
    fn sql(&self) -> String {
        format!("{}.{}", self.table.name, self.name)
    }
}

/// Column glosses, with the table gloss prefixed where two tables share a
/// column gloss.
fn columns(schema: &DatabaseSchema) -> Vec<Col<'_>> {
    let mut cols: Vec<Col> = schema
        .tables
        .iter()
        .flat_map(|t| {
            t.columns.iter().map(move |c| Col { table: t, name: &c.name, dtype: c.dtype, gloss: gloss(&c.name) })
        })
        .collect();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for c in &cols {
        *seen.entry(c.gloss.clone()).or_default() += 1;
    }
    for c in &mut cols {
        if seen[&c.gloss] > 1 {
            c.gloss = format!("{}的{}", gloss(&c.table.name), c.gloss);
        }
    }
    cols
}

const NUMBERS: [f64; 8] = [1.0, 2.0, 3.0, 5.0, 10.0, 100.0, 1000.0, 5000.0];
const BINS: [(&str, &str); 4] = [("YEAR", "年"), ("MONTH", "月"), ("WEEKDAY", "星期几"), ("DAY", "天")];

struct Draft {
    question: String,
    vql: String,
    extras: usize,
}

fn pick<'a, 'b, R: Rng>(rng: &mut R, cols: &'b [&'b Col<'a>]) -> Option<&'b Col<'a>> {
    cols.choose(rng).copied()
}

/// One attempt at a sample for `chart`; `None` when the schema lacks the
/// column types the chart needs.
fn draft<R: Rng>(rng: &mut R, schema: &DatabaseSchema, chart: ChartType) -> Option<Draft> {
    let all = columns(schema);
    let table = schema.tables.choose(rng)?;
    let here: Vec<&Col> = all.iter().filter(|c| c.table.name == table.name).collect();
    let of = |d: DType| -> Vec<&Col> { here.iter().copied().filter(|c| c.dtype == d).collect() };
    let (texts, nums, times) = (of(DType::Text), of(DType::Number), of(DType::Time));
    let mut extras = 0;

    // A join brings x from a parent table while counting or aggregating the child.
    let fk = table.foreign_keys.first().filter(|_| matches!(chart, ChartType::Bar | ChartType::Pie) && rng.random_bool(0.3));
    let mut from = format!("FROM {}", table.name);
    let mut join_mention = String::new();
    let parent_texts: Vec<&Col>;
    let x_texts: &[&Col] = if let Some(f) = fk {
        let (local, pcol) = (&f.0, &f.2);
        let parent = schema.table(&f.1)?;
        parent_texts = all.iter().filter(|c| c.table.name == parent.name && c.dtype == DType::Text).collect();
        from = format!(
            "FROM {t} JOIN {p} ON {t}.{local} = {p}.{pcol}",
            t = table.name,
            p = parent.name
        );
        join_mention = gloss(&table.name);
        extras += 1;
        &parent_texts
    } else {
        &texts
    };

    let mut select_y = String::new();
    let mut y_phrase = String::new();
    let mut group = Vec::new();
    let mut bin = String::new();
    let mut color = String::new();
    let mut color_phrase = String::new();
    let body;

    let aggs = [AggFn::Sum, AggFn::Avg, AggFn::Min, AggFn::Max];
    let grouped_y = |rng: &mut R, select_y: &mut String, y_phrase: &mut String| {
        if nums.is_empty() || rng.random_bool(0.5) {
            *select_y = "COUNT(*)".into();
            *y_phrase = format!("{join_mention}数量");
        } else {
            let y = pick(rng, &nums).expect("nonempty");
            let a = *aggs.choose(rng).expect("nonempty");
            *select_y = format!("{}({})", a.keyword().expect("aggregate"), y.sql());
            *y_phrase = format!("{}{}", agg_phrase(a), y.gloss);
        }
    };

    match chart {
        ChartType::Bar | ChartType::Pie | ChartType::StackedBar => {
            let use_bin = chart == ChartType::Bar && fk.is_none() && !times.is_empty() && rng.random_bool(0.3);
            if use_bin {
                let x = pick(rng, &times)?;
                let (unit, unit_zh) = *BINS.choose(rng)?;
                select_y = format!("COUNT({})", x.sql());
                y_phrase = "数量".into();
                bin = format!(" BIN {} BY {unit}", x.sql());
                body = format!("按{unit_zh}统计{}的{y_phrase}", x.gloss);
                extras += 1;
                return finish(rng, chart, x, &select_y, &y_phrase, &from, "", "", &[], &bin, body, extras, &nums);
            }
            let x = pick(rng, x_texts)?;
            grouped_y(rng, &mut select_y, &mut y_phrase);
            group.push(x.sql());
            if chart == ChartType::StackedBar {
                let others: Vec<&Col> = texts.iter().copied().filter(|c| c.name != x.name || c.table.name != x.table.name).collect();
                let c = pick(rng, &others)?;
                color = format!(" , COLOR {}", c.sql());
                color_phrase = format!("，按{}分组", c.gloss);
                group.push(c.sql());
            }
            body = format!("每个{}的{y_phrase}", x.gloss);
            finish(rng, chart, x, &select_y, &y_phrase, &from, &color, &color_phrase, &group, &bin, body, extras, &nums)
        }
        ChartType::Line | ChartType::GroupedLine => {
            let xs: Vec<&Col> = times.iter().chain(nums.iter()).copied().collect();
            let x = pick(rng, &xs)?;
            if chart == ChartType::Line && x.dtype == DType::Time && rng.random_bool(0.5) {
                let (unit, unit_zh) = *BINS.choose(rng)?;
                select_y = format!("COUNT({})", x.sql());
                y_phrase = "数量".into();
                bin = format!(" BIN {} BY {unit}", x.sql());
                body = format!("按{unit_zh}统计{}的{y_phrase}", x.gloss);
                extras += 1;
                return finish(rng, chart, x, &select_y, &y_phrase, &from, "", "", &[], &bin, body, extras, &nums);
            }
            let ys: Vec<&Col> = nums.iter().copied().filter(|c| c.name != x.name).collect();
            let y = pick(rng, &ys)?;
            select_y = y.sql();
            y_phrase = y.gloss.clone();
            if chart == ChartType::GroupedLine {
                let c = pick(rng, &texts)?;
                color = format!(" , COLOR {}", c.sql());
                color_phrase = format!("，按{}分组", c.gloss);
            }
            body = format!("{}和{y_phrase}", x.gloss);
            finish(rng, chart, x, &select_y, &y_phrase, &from, &color, &color_phrase, &[], "", body, extras, &nums)
        }
        ChartType::Scatter | ChartType::GroupedScatter => {
            if nums.len() < 2 {
                return None;
            }
            let x = pick(rng, &nums)?;
            let ys: Vec<&Col> = nums.iter().copied().filter(|c| c.name != x.name).collect();
            let y = pick(rng, &ys)?;
            select_y = y.sql();
            y_phrase = y.gloss.clone();
            if chart == ChartType::GroupedScatter {
                let c = pick(rng, &texts)?;
                color = format!(" , COLOR {}", c.sql());
                color_phrase = format!("，按{}分组", c.gloss);
            }
            body = format!("{}和{y_phrase}", x.gloss);
            finish(rng, chart, x, &select_y, &y_phrase, &from, &color, &color_phrase, &[], "", body, extras, &nums)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish<R: Rng>(
    rng: &mut R,
    chart: ChartType,
    x: &Col,
    select_y: &str,
    y_phrase: &str,
    from: &str,
    color: &str,
    color_phrase: &str,
    group: &[String],
    bin: &str,
    body: String,
    mut extras: usize,
    nums: &[&Col],
) -> Option<Draft> {
    let mut where_sql = String::new();
    let mut where_zh = String::new();
    if !nums.is_empty() && rng.random_bool(0.3) {
        let c = pick(rng, nums)?;
        let op = *[CmpOp::Gt, CmpOp::Lt, CmpOp::Ge, CmpOp::Le, CmpOp::Eq, CmpOp::Ne].choose(rng)?;
        let v = Literal::Number(*NUMBERS.choose(rng)?);
        where_sql = format!(" WHERE {} {} {v}", c.sql(), op.symbol());
        where_zh = format!("{}{}{v}的", c.gloss, op_phrase(op));
        extras += 1;
    }
    let mut order_sql = String::new();
    let mut order_zh = String::new();
    let orderable = matches!(chart, ChartType::Bar | ChartType::Pie | ChartType::Line | ChartType::StackedBar);
    if orderable && rng.random_bool(0.3) {
        let (axis, target) = if rng.random_bool(0.5) { ("X", x.gloss.as_str()) } else { ("Y", y_phrase) };
        let (dir, dir_zh) = if rng.random_bool(0.5) { ("ASC", "升序") } else { ("DESC", "降序") };
        order_sql = format!(" ORDER BY {axis} {dir}");
        order_zh = format!("，按{target}{dir_zh}排列");
        extras += 1;
    }
    if !color.is_empty() {
        extras += 1;
    }
    let group_sql = if group.is_empty() { String::new() } else { format!(" GROUP BY {}", group.join(" , ")) };
    let vql = format!(
        "Visualize {chart} SELECT {} , {select_y}{color} {from}{where_sql}{group_sql}{bin}{order_sql}",
        x.sql()
    );
    let question = format!("用{}展示{where_zh}{body}{color_phrase}{order_zh}", chart_phrase(chart));
    Some(Draft { question, vql, extras })
}

fn hardness(extras: usize) -> Hardness {
    match extras {
        0 => Hardness::Easy,
        1 => Hardness::Medium,
        2 => Hardness::Hard,
        _ => Hardness::ExtraHard,
    }
}

/// `n` samples; chart types are cycled so every type appears once `n ≥ 7`
/// and the schemas support it. Deterministic in `seed`.
pub fn generate_synthetic_corpus(schemas: &SchemaSet, n: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dbs: Vec<&DatabaseSchema> = schemas.iter().collect();
    let mut out = Vec::with_capacity(n);
    if dbs.is_empty() {
        return out;
    }
    let mut attempts = 0;
    while out.len() < n && attempts < n * 200 {
        attempts += 1;
        let chart = ChartType::ALL[out.len() % ChartType::ALL.len()];
        let schema = *dbs.choose(&mut rng).expect("nonempty");
        let Some(d) = draft(&mut rng, schema, chart) else { continue };
        let ok = parse_vql(&d.vql).ok().and_then(|q| canonicalize(&q, schema).ok()).is_some();
        if !ok {
            continue;
        }
        out.push(Sample {
            id: format!("syn{:05}", out.len()),
            db_id: schema.db_id.clone(),
            question_zh: d.question,
            vql: d.vql,
            hardness: hardness(d.extras),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glosses() {
        assert_eq!(gloss("department_name"), "部门名称");
        assert_eq!(gloss("First_Name"), "名字");
        assert_eq!(gloss("foo_id"), "foo编号");
    }
}
