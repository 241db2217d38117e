use std::path::PathBuf;

use t2v_core::compiler::{render_pipeline, PipelineError, Stage};
use t2v_core::vql::{parse_vql, ChartType};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn cases() -> Vec<(String, String, String)> {
    let text = std::fs::read_to_string(fixtures().join("golden/cases.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut parts = l.splitn(3, '\t');
            (
                parts.next().unwrap().to_string(),
                parts.next().unwrap().to_string(),
                parts.next().unwrap().to_string(),
            )
        })
        .collect()
}

/// Set `T2V_BLESS=1` to rewrite the golden files after a deliberate change.
#[test]
fn specs_match_golden_files() {
    let bless = std::env::var_os("T2V_BLESS").is_some();
    let data = fixtures().join("data");
    for (name, db, vql) in cases() {
        let doc = render_pipeline(&vql, &db, &data).unwrap_or_else(|e| panic!("{name}: {e}"));
        let path = fixtures().join(format!("golden/{name}.vl.json"));
        let text = doc.to_json_string();
        if bless {
            std::fs::write(&path, &text).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(text, want, "{name}");
    }
}

#[test]
fn every_chart_type_has_a_golden_case() {
    let charts: Vec<ChartType> = cases()
        .iter()
        .map(|(_, _, vql)| parse_vql(vql).unwrap().chart)
        .collect();
    for c in ChartType::ALL {
        assert!(charts.contains(&c), "{c}");
    }
}

#[test]
fn channels_reference_fields_present_in_rows() {
    let data = fixtures().join("data");
    for (name, db, vql) in cases() {
        let doc = render_pipeline(&vql, &db, &data).unwrap();
        let v = doc.as_value();
        assert!(["bar", "line", "point", "arc"].contains(&doc.mark()), "{name}");
        for (_, chan) in v["encoding"].as_object().unwrap() {
            let field = chan["field"].as_str().unwrap();
            for row in doc.values() {
                assert!(row.get(field).is_some(), "{name}: {field} missing");
            }
        }
    }
}

#[test]
fn movie_query_renders_descending_bar() {
    let doc = render_pipeline(
        "Visualize BAR SELECT name , COUNT(name) FROM movies WHERE stars BETWEEN 3 AND 5 GROUP BY name ORDER BY X DESC",
        "cinema",
        fixtures().join("data"),
    )
    .unwrap();
    assert_eq!(doc.mark(), "bar");
    let names: Vec<&str> = doc.values().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["Up", "Heat", "Alien"]);
    let counts: Vec<i64> = doc.values().iter().map(|r| r["count_name"].as_i64().unwrap()).collect();
    assert_eq!(counts, [1, 2, 2]);
}

#[test]
fn weekday_bins_use_calendar_order() {
    let doc = render_pipeline(
        "Visualize BAR SELECT hire_date , SUM(manager_id) FROM employees WHERE first_name LIKE '%D%' BIN hire_date BY WEEKDAY",
        "hr",
        fixtures().join("data"),
    )
    .unwrap();
    let days: Vec<&str> = doc.values().iter().map(|r| r["hire_date"].as_str().unwrap()).collect();
    let mut sorted = days.clone();
    let order = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
    sorted.sort_by_key(|d| order.iter().position(|o| o == d));
    assert_eq!(days, sorted);
}

#[test]
fn errors_carry_their_stage() {
    let data = fixtures().join("data");
    let stage = |r: Result<_, PipelineError>| r.unwrap_err().stage;
    assert_eq!(stage(render_pipeline("Visualize BAR SELECT", "cinema", &data)), Stage::Parse);
    let err = render_pipeline("Visualize BAR SELECT name , stars FROM movies", "nowhere", &data).unwrap_err();
    assert_eq!(err.stage, Stage::Load);
    assert_eq!(err.kind(), "MissingDatabase");
    assert_eq!(
        stage(render_pipeline("Visualize BAR SELECT nom , stars FROM movies", "cinema", &data)),
        Stage::Canonicalize
    );
}
