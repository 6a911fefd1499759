//! HTTP routes. Request and response shapes are documented in docs/api.md.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use rescue_core::{EnvVector, WeightConfig};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dispatcher::{queue_order, CompleteRequest, Dispatcher, Preview, PreviewRequest, TaskRequest, UnitRequest};
use crate::error::ServiceError;

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    details: Vec<String>,
}

pub enum ApiError {
    Service(ServiceError),
    Body(JsonRejection),
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::Service(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::Body(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::Body(r) => (r.status(), ErrorBody { error: r.body_text(), details: Vec::new() }),
            ApiError::Service(e) => {
                let status = match &e {
                    ServiceError::Conflict(_) => StatusCode::CONFLICT,
                    ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
                    ServiceError::Invalid(_) | ServiceError::Core(_) => StatusCode::UNPROCESSABLE_ENTITY,
                    ServiceError::Log(_) => StatusCode::INTERNAL_SERVER_ERROR,
                };
                let details = match &e {
                    ServiceError::Invalid(list) => list.clone(),
                    ServiceError::Core(rescue_core::Error::Validation(list)) => list.clone(),
                    _ => Vec::new(),
                };
                (status, ErrorBody { error: e.to_string(), details })
            }
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type Shared = State<Arc<Dispatcher>>;

async fn post_task(State(d): Shared, body: Result<Json<TaskRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let created = d.ingest_task(body?.0)?;
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

async fn get_schedule(State(d): Shared) -> ApiResult<serde_json::Value> {
    Ok(Json(serde_json::to_value(d.schedule()?).expect("schedule serializes")))
}

async fn post_preview(State(d): Shared, body: Result<Json<PreviewRequest>, JsonRejection>) -> ApiResult<Preview> {
    Ok(Json(d.preview(body?.0)?))
}

async fn dispatch(State(d): Shared) -> ApiResult<serde_json::Value> {
    let (seq, mission) = d.dispatch_next()?;
    Ok(Json(json!({ "seq": seq, "mission": mission })))
}

async fn complete(
    State(d): Shared,
    Path(id): Path<String>,
    body: Result<Json<CompleteRequest>, JsonRejection>,
) -> ApiResult<serde_json::Value> {
    let resp = d.complete_mission(&id, body?.0)?;
    Ok(Json(serde_json::to_value(resp).expect("response serializes")))
}

async fn put_weights(State(d): Shared, body: Result<Json<WeightConfig>, JsonRejection>) -> ApiResult<serde_json::Value> {
    let (seq, queue) = d.set_weights(body?.0)?;
    Ok(Json(json!({ "seq": seq, "queue": queue })))
}

async fn get_weights(State(d): Shared) -> Json<WeightConfig> {
    Json(d.snapshot().weights.clone())
}

async fn post_unit(State(d): Shared, body: Result<Json<UnitRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let (seq, unit) = d.register_unit(body?.0)?;
    Ok((StatusCode::CREATED, Json(json!({ "seq": seq, "unit": unit }))).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvBody {
    env: EnvVector,
}

async fn post_env(
    State(d): Shared,
    Path(id): Path<String>,
    body: Result<Json<EnvBody>, JsonRejection>,
) -> ApiResult<serde_json::Value> {
    let (seq, task) = d.update_env(&id, body?.0.env)?;
    Ok(Json(json!({ "seq": seq, "task": task })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideBody {
    priority: f64,
}

async fn post_override(
    State(d): Shared,
    Path(id): Path<String>,
    body: Result<Json<OverrideBody>, JsonRejection>,
) -> ApiResult<serde_json::Value> {
    let (seq, position) = d.override_priority(&id, body?.0.priority)?;
    Ok(Json(json!({ "seq": seq, "task_id": id, "queue_position": position })))
}

async fn get_metrics(State(d): Shared) -> Json<rescue_core::MetricsReport> {
    Json(d.metrics())
}

async fn get_state(State(d): Shared) -> Json<serde_json::Value> {
    Json(serde_json::to_value(&*d.snapshot()).expect("state serializes"))
}

async fn get_queue(State(d): Shared) -> Json<Vec<String>> {
    Json(queue_order(&d.snapshot()))
}

pub fn router(d: Arc<Dispatcher>) -> Router {
    Router::new()
        .route("/tasks", post(post_task))
        .route("/tasks/{id}/env", post(post_env))
        .route("/tasks/{id}/priority-override", post(post_override))
        .route("/queue", get(get_queue))
        .route("/schedule", get(get_schedule))
        .route("/schedule/preview", post(post_preview))
        .route("/missions/dispatch", post(dispatch))
        .route("/missions/{id}/complete", post(complete))
        .route("/config/weights", put(put_weights).get(get_weights))
        .route("/units", post(post_unit))
        .route("/metrics", get(get_metrics))
        .route("/state", get(get_state))
        .with_state(d)
}

pub async fn serve(addr: std::net::SocketAddr, d: Arc<Dispatcher>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(d)).await
}
