use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use t2v_cli::args::default_origins;
use t2v_cli::server::{self, AppState, PredictRequest};
use t2v_core::compiler::DataStore;
use t2v_core::dataset::SchemaSet;
use t2v_neural::{checkpoint, generate_synthetic_corpus, train, TrainConfig};
use tower::ServiceExt;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn state() -> Arc<AppState> {
    static STATE: OnceLock<Arc<AppState>> = OnceLock::new();
    STATE
        .get_or_init(|| {
            let data = fixtures().join("data");
            let schemas = SchemaSet::from_json(&std::fs::read_to_string(data.join("schemas.json")).unwrap()).unwrap();
            let samples = generate_synthetic_corpus(&schemas, 40, 1);
            let cfg = TrainConfig { d_model: 16, n_layers: 1, d_ff: 32, d_ngram: 8, d_lstm: 24, epochs: 8, ..TrainConfig::default() };
            let (model, _) = train(&samples, &schemas, &cfg).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("model.bin");
            checkpoint::save(&model, &path).unwrap();
            Arc::new(AppState::load(&path, &data, 5).unwrap())
        })
        .clone()
}

async fn call(method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let app = server::router(state(), &default_origins()).unwrap();
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

#[tokio::test]
async fn lists_and_fetches_schemas() {
    let (status, body) = call(Method::GET, "/schemas", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!(["cinema", "fault", "hr", "tiny"]));
    let (status, body) = call(Method::GET, "/schemas/cinema", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["db_id"], "cinema");
    assert_eq!(serde_json::to_value(state().store.schemas().get("cinema").unwrap()).unwrap(), body);
    let (status, body) = call(Method::GET, "/schemas/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["stage"], "load");
}

#[tokio::test]
async fn compile_matches_golden_files() {
    let cases = std::fs::read_to_string(fixtures().join("golden/cases.tsv")).unwrap();
    for line in cases.lines() {
        let mut parts = line.splitn(3, '\t');
        let (name, db, vql) = (parts.next().unwrap(), parts.next().unwrap(), parts.next().unwrap());
        let (status, body) = call(Method::POST, "/compile", Some(json!({"vql": vql, "db_id": db}))).await;
        assert_eq!(status, StatusCode::OK, "{name}: {body}");
        let golden = std::fs::read_to_string(fixtures().join(format!("golden/{name}.vl.json"))).unwrap();
        let golden: Value = serde_json::from_str(&golden).unwrap();
        assert_eq!(body["spec"], golden, "{name}");
    }
}

#[tokio::test]
async fn compile_errors_name_their_stage() {
    let vql = "Visualize BAR SELECT genre , COUNT(*) FROM movies GROUP BY genre";
    let cases = [
        (json!({"vql": vql, "db_id": "nope"}), StatusCode::NOT_FOUND, "load"),
        (json!({"vql": "Visualize BAR SELECT", "db_id": "cinema"}), StatusCode::BAD_REQUEST, "parse"),
        (json!({"vql": vql.replace("genre", "genus"), "db_id": "cinema"}), StatusCode::BAD_REQUEST, "canonicalize"),
        (json!({"vql": vql}), StatusCode::UNPROCESSABLE_ENTITY, "request"),
    ];
    for (body, status, stage) in cases {
        let (got, resp) = call(Method::POST, "/compile", Some(body.clone())).await;
        assert_eq!(got, status, "{body}: {resp}");
        assert_eq!(resp["stage"], stage, "{body}");
        assert!(!resp["message"].as_str().unwrap().is_empty());
    }
}

#[tokio::test]
async fn predict_returns_ranked_candidates_with_specs() {
    let store = DataStore::open(fixtures().join("data")).unwrap();
    for (question, db) in [("用柱状图展示每种类型的电影数量", "cinema"), ("各部门的平均工资", "hr")] {
        let (status, body) = call(Method::POST, "/predict", Some(json!({"question": question, "db_id": db, "k": 3}))).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        let cands = body["candidates"].as_array().unwrap();
        assert!(!cands.is_empty() && cands.len() <= 3);
        let scores: Vec<f64> = cands.iter().map(|c| c["score"].as_f64().unwrap()).collect();
        assert!(scores.windows(2).all(|w| w[0] >= w[1]), "{scores:?}");
        for c in cands {
            let vql = c["vql"].as_str().unwrap();
            let rendered = store.render(vql, db).ok();
            match (&c["spec"], c["valid"].as_bool().unwrap()) {
                (Value::Null, true) => assert!(rendered.is_none(), "{vql}"),
                (Value::Null, false) => {}
                (spec, true) => assert_eq!(spec, rendered.unwrap().as_value()),
                (_, false) => panic!("spec on an invalid candidate: {vql}"),
            }
        }
    }
}

#[tokio::test]
async fn predict_rejects_bad_requests() {
    let cases = [
        (json!({"question": "电影", "db_id": "cinema", "k": 11}), StatusCode::BAD_REQUEST, "request"),
        (json!({"question": "电影", "db_id": "cinema", "k": 0}), StatusCode::BAD_REQUEST, "request"),
        (json!({"question": "电影", "db_id": "nope", "k": 3}), StatusCode::NOT_FOUND, "load"),
        (json!({"question": "  ", "db_id": "cinema", "k": 3}), StatusCode::BAD_REQUEST, "input"),
        (json!({"question": "很".repeat(500), "db_id": "cinema", "k": 3}), StatusCode::BAD_REQUEST, "input"),
        (json!({"db_id": "cinema"}), StatusCode::UNPROCESSABLE_ENTITY, "request"),
    ];
    for (body, status, stage) in cases {
        let (got, resp) = call(Method::POST, "/predict", Some(body.clone())).await;
        assert_eq!(got, status, "{resp}");
        assert_eq!(resp["stage"], stage);
    }
    let app = server::router(state(), &default_origins()).unwrap();
    let req = Request::post("/predict").header(header::CONTENT_TYPE, "application/json").body(Body::from("{")).unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_predictions_match_serial_ones() {
    let questions = ["用柱状图展示每种类型的电影数量", "各部门的平均工资", "故障状态的分布", "每个地区的销售额"];
    let dbs = ["cinema", "hr", "fault", "tiny"];
    let mut serial = Vec::new();
    for (q, db) in questions.iter().zip(dbs) {
        serial.push(call(Method::POST, "/predict", Some(json!({"question": q, "db_id": db, "k": 5}))).await);
    }
    let mut handles = Vec::new();
    for round in 0..3 {
        for (q, db) in questions.iter().zip(dbs) {
            let body = json!({"question": q, "db_id": db, "k": 5});
            handles.push((round, tokio::spawn(call(Method::POST, "/predict", Some(body)))));
        }
    }
    for (i, (_, h)) in handles.into_iter().enumerate() {
        assert_eq!(h.await.unwrap(), serial[i % questions.len()]);
    }
    let direct = server::predict(&state(), &PredictRequest { question: questions[0].into(), db_id: dbs[0].into(), k: 5 }).unwrap();
    assert_eq!(serde_json::to_value(direct).unwrap(), serial[0].1);
}

#[tokio::test]
async fn cors_allows_only_listed_origins() {
    let preflight = |origin: &'static str| {
        Request::builder()
            .method(Method::OPTIONS)
            .uri("/predict")
            .header(header::ORIGIN, origin)
            .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
            .body(Body::empty())
            .unwrap()
    };
    let app = server::router(state(), &default_origins()).unwrap();
    let ok = app.clone().oneshot(preflight("http://localhost:5173")).await.unwrap();
    assert_eq!(ok.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "http://localhost:5173");
    let denied = app.oneshot(preflight("http://evil.example")).await.unwrap();
    assert!(denied.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_none());
    assert!(server::router(state(), &["bad\norigin".to_string()]).is_err());
}

#[test]
fn startup_fails_on_missing_artifacts() {
    let data = fixtures().join("data");
    let dir = tempfile::tempdir().unwrap();
    assert!(AppState::load(&dir.path().join("missing.bin"), &data, 5).is_err());
    let corrupt = dir.path().join("corrupt.bin");
    std::fs::write(&corrupt, b"T2VMODEL garbage").unwrap();
    assert!(AppState::load(&corrupt, &data, 5).is_err());
}
