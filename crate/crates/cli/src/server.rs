//! JSON API over an immutable model and data snapshot.

use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use t2v_core::compiler::{Cause, CompileError, DataStore, PipelineError, Stage};
use t2v_core::dataset::DatabaseSchema;
use t2v_neural::checkpoint;
use t2v_neural::{Model, NeuralError};
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const MAX_K: usize = 10;

pub struct AppState {
    pub model: Model<f32>,
    pub store: DataStore,
    pub beam: usize,
}

impl AppState {
    /// Load the checkpoint and every database up front so that missing or
    /// corrupt artifacts fail at startup.
    pub fn load(model_path: &Path, data_dir: &Path, beam: usize) -> anyhow::Result<Self> {
        let model = checkpoint::load(model_path).with_context(|| format!("loading model {}", model_path.display()))?;
        let store = DataStore::open(data_dir).with_context(|| format!("opening {}", data_dir.display()))?;
        for schema in store.schemas().iter() {
            store.database(&schema.db_id).with_context(|| format!("loading database {}", schema.db_id))?;
        }
        Ok(AppState { model, store, beam: beam.max(1) })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub stage: String,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, stage: impl Into<String>, message: impl ToString) -> Self {
        ApiError { status: status.as_u16(), stage: stage.into(), message: message.to_string() }
    }

    fn request(e: JsonRejection) -> Self {
        ApiError::new(e.status(), "request", e.body_text())
    }

    fn pipeline(e: PipelineError) -> Self {
        let status = match (&e.stage, &e.cause) {
            (Stage::Load, Cause::Compile(CompileError::MissingDatabase(_))) => StatusCode::NOT_FOUND,
            (_, Cause::Compile(CompileError::Io { .. }) | Cause::Dataset(_)) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.stage.to_string(), format!("{}: {}", e.kind(), e.cause))
    }

    fn unknown_db(db_id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, Stage::Load.to_string(), format!("unknown database {db_id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

fn default_k() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictRequest {
    pub question: String,
    pub db_id: String,
    #[serde(default = "default_k")]
    pub k: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PredictedCandidate {
    pub vql: String,
    pub score: f64,
    pub valid: bool,
    pub spec: Option<Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PredictResponse {
    pub candidates: Vec<PredictedCandidate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileRequest {
    pub vql: String,
    pub db_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CompileResponse {
    pub spec: Value,
}

pub fn predict(state: &AppState, req: &PredictRequest) -> Result<PredictResponse, ApiError> {
    if req.k == 0 || req.k > MAX_K {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "request", format!("k must be in 1..={MAX_K}, got {}", req.k)));
    }
    let schema = state.store.schemas().get(&req.db_id).ok_or_else(|| ApiError::unknown_db(&req.db_id))?;
    let width = state.beam.max(req.k);
    let result = state.model.beam_search(&req.question, schema, width, req.k).map_err(|e| match e {
        NeuralError::EmptyQuestion | NeuralError::Length { .. } => ApiError::new(StatusCode::BAD_REQUEST, "input", e),
        e => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "predict", e),
    })?;
    let candidates = result
        .candidates
        .into_iter()
        .map(|c| {
            let spec = if c.valid { state.store.render(&c.vql, &req.db_id).ok().map(|d| d.0) } else { None };
            PredictedCandidate { vql: c.vql, score: c.score, valid: c.valid, spec }
        })
        .collect();
    Ok(PredictResponse { candidates })
}

pub fn compile(state: &AppState, req: &CompileRequest) -> Result<CompileResponse, ApiError> {
    let doc = state.store.render(&req.vql, &req.db_id).map_err(ApiError::pipeline)?;
    Ok(CompileResponse { spec: doc.0 })
}

type Shared = Arc<AppState>;

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<Json<T>, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e))?
        .map(Json)
}

async fn list_schemas(State(state): State<Shared>) -> Json<Vec<String>> {
    Json(state.store.schemas().iter().map(|s| s.db_id.clone()).collect())
}

async fn get_schema(State(state): State<Shared>, UrlPath(db_id): UrlPath<String>) -> Result<Json<DatabaseSchema>, ApiError> {
    state.store.schemas().get(&db_id).cloned().map(Json).ok_or_else(|| ApiError::unknown_db(&db_id))
}

async fn predict_handler(
    State(state): State<Shared>,
    body: Result<Json<PredictRequest>, JsonRejection>,
) -> Result<Json<PredictResponse>, ApiError> {
    let Json(req) = body.map_err(ApiError::request)?;
    blocking(move || predict(&state, &req)).await
}

async fn compile_handler(
    State(state): State<Shared>,
    body: Result<Json<CompileRequest>, JsonRejection>,
) -> Result<Json<CompileResponse>, ApiError> {
    let Json(req) = body.map_err(ApiError::request)?;
    blocking(move || compile(&state, &req)).await
}

fn cors(origins: &[String]) -> anyhow::Result<CorsLayer> {
    let origins = origins
        .iter()
        .map(|o| HeaderValue::from_str(o).with_context(|| format!("bad origin {o:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(CorsLayer::new()
        .allow_origin(AllowOrigin::list(origins))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]))
}

pub fn router(state: Arc<AppState>, origins: &[String]) -> anyhow::Result<Router> {
    Ok(Router::new()
        .route("/schemas", get(list_schemas))
        .route("/schemas/{db_id}", get(get_schema))
        .route("/predict", post(predict_handler))
        .route("/compile", post(compile_handler))
        .layer(cors(origins)?)
        .with_state(state))
}

pub async fn serve(state: AppState, addr: SocketAddr, origins: &[String]) -> anyhow::Result<()> {
    let app = router(Arc::new(state), origins)?;
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
