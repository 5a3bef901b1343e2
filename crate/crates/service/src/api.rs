//! HTTP API over [`Engine`], plus static files for the explorer.

use std::path::Path;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::{ServeDir, ServeFile};

use crate::query::{Engine, PlanRequest, QueryError, API_SCHEMA_VERSION};

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorResponse {
    pub schema_version: u32,
    pub error: ErrorBody,
}

pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        Self::new(status, e.code(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorResponse {
            schema_version: API_SCHEMA_VERSION,
            error: ErrorBody {
                code: self.code.to_string(),
                message: self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
struct JobsParams {
    #[serde(default)]
    q: String,
    limit: Option<usize>,
}

async fn jobs(
    State(engine): State<Arc<Engine>>,
    Query(params): Query<JobsParams>,
) -> impl IntoResponse {
    Json(engine.search_jobs(&params.q, params.limit))
}

async fn weights(State(engine): State<Arc<Engine>>) -> impl IntoResponse {
    Json(engine.weights())
}

async fn plan(
    State(engine): State<Arc<Engine>>,
    body: Result<Json<PlanRequest>, JsonRejection>,
) -> ApiResult<crate::query::PlanResponse> {
    let Json(request) = body?;
    Ok(Json(engine.plan(&request)?))
}

async fn benchmark(State(engine): State<Arc<Engine>>) -> Response {
    match engine.report() {
        // Already carries its own schema_version.
        Some(report) => Json(report).into_response(),
        None => ApiError::new(
            StatusCode::NOT_FOUND,
            "not_found",
            "no benchmark report; run `benchmark` first",
        )
        .into_response(),
    }
}

async fn neighbors(
    State(engine): State<Arc<Engine>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<crate::query::NeighborsResponse> {
    let id: usize = id.parse().map_err(|_| {
        ApiError::new(
            StatusCode::BAD_REQUEST,
            "invalid_request",
            format!("bad job id {id:?}"),
        )
    })?;
    Ok(Json(engine.neighbors(id)?))
}

async fn api_not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

/// The API under `/api`; everything else is served from `static_dir` when
/// given, falling back to its `index.html`.
pub fn router(engine: Arc<Engine>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/jobs", get(jobs))
        .route("/weights", get(weights))
        .route("/plan", post(plan))
        .route("/benchmark", get(benchmark))
        .route("/graph/neighbors/{id}", get(neighbors))
        .fallback(api_not_found)
        .with_state(engine);
    let app = Router::new().nest("/api", api);
    match static_dir {
        Some(dir) => app.fallback_service(
            ServeDir::new(dir).not_found_service(ServeFile::new(dir.join("index.html"))),
        ),
        None => app.fallback(api_not_found),
    }
}
