use serde_json::{json, Map, Value};

use super::{Cell, Relation};
use crate::dataset::DType;
use crate::vql::{Axis, ChartType, Direction, VqlQuery};

pub const VEGA_LITE_SCHEMA: &str = "https://vega.github.io/schema/vega-lite/v5.json";

/// A Vega-Lite document with every transform already applied to its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct VegaLiteDoc(pub Value);

impl VegaLiteDoc {
    pub fn as_value(&self) -> &Value {
        &self.0
    }

    pub fn mark(&self) -> &str {
        self.0["mark"].as_str().unwrap_or_default()
    }

    pub fn values(&self) -> &[Value] {
        self.0["data"]["values"].as_array().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.0).expect("json values serialize");
        s.push('\n');
        s
    }
}

pub fn cell_to_json(cell: &Cell) -> Value {
    match cell {
        Cell::Null => Value::Null,
        Cell::Number(n) => {
            let n = if *n == 0.0 { 0.0 } else { *n };
            if n.fract() == 0.0 && n.abs() < 9_007_199_254_740_992.0 {
                json!(n as i64)
            } else {
                json!(n)
            }
        }
        Cell::Text(s) => json!(s),
        Cell::Time(t) => json!(t.to_string()),
    }
}

fn mark(chart: ChartType) -> &'static str {
    match chart {
        ChartType::Bar | ChartType::StackedBar => "bar",
        ChartType::Pie => "arc",
        ChartType::Line | ChartType::GroupedLine => "line",
        ChartType::Scatter | ChartType::GroupedScatter => "point",
    }
}

fn x_type(chart: ChartType, dtype: DType) -> &'static str {
    match (chart, dtype) {
        (ChartType::Bar | ChartType::StackedBar | ChartType::Pie, _) => "nominal",
        (ChartType::Line | ChartType::GroupedLine, DType::Text) => "ordinal",
        (ChartType::Scatter | ChartType::GroupedScatter, DType::Text) => "nominal",
        (_, DType::Number) => "quantitative",
        (_, DType::Time) => "temporal",
    }
}

fn measure_type(dtype: DType) -> &'static str {
    match dtype {
        DType::Number => "quantitative",
        DType::Time => "temporal",
        DType::Text => "nominal",
    }
}

fn channel(field: &str, kind: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("field".into(), json!(field));
    m.insert("type".into(), json!(kind));
    m
}

/// Sort for a discrete category channel: data order unless ORDER BY says
/// otherwise.
fn category_sort(q: &VqlQuery, y_field: &str) -> Value {
    match q.order {
        None => Value::Null,
        Some(o) => {
            let dir = match o.direction {
                Direction::Asc => "ascending",
                Direction::Desc => "descending",
            };
            match o.target {
                Axis::X => json!(dir),
                Axis::Y => json!({"field": y_field, "order": dir}),
            }
        }
    }
}

pub fn emit_spec(q: &VqlQuery, result: &Relation) -> VegaLiteDoc {
    let fields: Vec<&str> = result.columns.iter().map(|(n, _)| n.as_str()).collect();
    let (x_field, x_dtype) = (&result.columns[0].0, result.columns[0].1);
    let (y_field, y_dtype) = result.columns.last().map(|(n, t)| (n, *t)).expect("y column");
    let color = (result.columns.len() == 3).then(|| &result.columns[1].0);

    let values: Vec<Value> = result
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = fields
                .iter()
                .zip(row)
                .map(|(f, c)| (f.to_string(), cell_to_json(c)))
                .collect();
            Value::Object(obj)
        })
        .collect();

    let mut encoding = Map::new();
    if q.chart == ChartType::Pie {
        let mut theta = channel(y_field, measure_type(y_dtype));
        theta.insert("stack".into(), json!(true));
        let mut col = channel(x_field, "nominal");
        col.insert("sort".into(), category_sort(q, y_field));
        encoding.insert("theta".into(), Value::Object(theta));
        encoding.insert("color".into(), Value::Object(col));
    } else {
        let kind = x_type(q.chart, x_dtype);
        let mut x = channel(x_field, kind);
        if kind == "nominal" || kind == "ordinal" {
            x.insert("sort".into(), category_sort(q, y_field));
        }
        let mut y = channel(y_field, measure_type(y_dtype));
        if q.chart == ChartType::StackedBar {
            y.insert("stack".into(), json!("zero"));
        }
        encoding.insert("x".into(), Value::Object(x));
        encoding.insert("y".into(), Value::Object(y));
        if let Some(c) = color {
            encoding.insert("color".into(), Value::Object(channel(c, "nominal")));
        }
    }

    VegaLiteDoc(json!({
        "$schema": VEGA_LITE_SCHEMA,
        "data": {"values": values},
        "encoding": encoding,
        "mark": mark(q.chart),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vql::{parse_vql, AggFn};

    fn pie_result() -> Relation {
        let mut r = Relation::new(vec![("c".into(), DType::Text), ("count".into(), DType::Number)]);
        r.rows.push(vec![Cell::Text("a".into()), Cell::Number(2.0)]);
        r.rows.push(vec![Cell::Text("b".into()), Cell::Number(1.0)]);
        r
    }

    #[test]
    fn pie_maps_theta_and_color() {
        let q = parse_vql("Visualize PIE SELECT c , COUNT(*) FROM t GROUP BY c").unwrap();
        assert_eq!(q.y.agg, AggFn::Count);
        let doc = emit_spec(&q, &pie_result());
        assert_eq!(doc.mark(), "arc");
        assert_eq!(doc.0["encoding"]["theta"]["field"], "count");
        assert_eq!(doc.0["encoding"]["color"]["field"], "c");
        assert_eq!(doc.values()[0]["count"], json!(2));
    }

    #[test]
    fn bar_is_nominal_over_quantitative() {
        let q = parse_vql("Visualize BAR SELECT c , COUNT(*) FROM t GROUP BY c ORDER BY X DESC").unwrap();
        let doc = emit_spec(&q, &pie_result());
        assert_eq!(doc.mark(), "bar");
        assert_eq!(doc.0["encoding"]["x"]["type"], "nominal");
        assert_eq!(doc.0["encoding"]["y"]["type"], "quantitative");
        assert_eq!(doc.0["encoding"]["x"]["sort"], "descending");
    }

    #[test]
    fn serialization_is_stable() {
        let q = parse_vql("Visualize BAR SELECT c , COUNT(*) FROM t GROUP BY c").unwrap();
        let a = emit_spec(&q, &pie_result()).to_json_string();
        let b = emit_spec(&q, &pie_result()).to_json_string();
        assert_eq!(a, b);
        assert!(a.starts_with("{\n  \"$schema\""));
    }

    #[test]
    fn numbers_format_shortest() {
        assert_eq!(cell_to_json(&Cell::Number(2.0)).to_string(), "2");
        assert_eq!(cell_to_json(&Cell::Number(-0.0)).to_string(), "0");
        assert_eq!(cell_to_json(&Cell::Number(0.1)).to_string(), "0.1");
        assert_eq!(cell_to_json(&Cell::Number(1.5e300)).to_string(), "1.5e+300");
    }
}
