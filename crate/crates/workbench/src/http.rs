//! REST routes over [`Service`]. Service calls block on providers, so each
//! handler runs on the blocking pool.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::service::{Service, ServiceError};
use crate::wire::*;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::Conflict { .. } => StatusCode::CONFLICT,
            ServiceError::Provider(_) => StatusCode::BAD_GATEWAY,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status.is_server_error() {
            tracing::warn!(%status, "{self}");
        }
        (status, Json(ErrorBody { error: self.to_string() })).into_response()
    }
}

type Shared = State<Arc<Service>>;
type Reply<T> = Result<Json<T>, ServiceError>;

async fn blocking<T, F>(svc: Arc<Service>, f: F) -> Reply<T>
where
    T: Serialize + Send + 'static,
    F: FnOnce(&Service) -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&svc))
        .await
        .map_err(|e| ServiceError::Storage(format!("worker failed: {e}")))?
        .map(Json)
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload.map(|Json(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/documents", post(create))
        .route("/documents/{id}/segments", get(segments))
        .route("/documents/{id}/segments/{n}", axum::routing::patch(edit))
        .route("/documents/{id}/segments/{n}/suggest", post(suggest))
        .route("/documents/{id}/segments/{n}/heatmap", get(heatmap))
        .route("/documents/{id}/export", get(export))
        .with_state(service)
}

async fn create(State(svc): Shared, payload: Result<Json<Interchange>, JsonRejection>) -> Result<(StatusCode, Json<DocumentView>), ServiceError> {
    let doc = body(payload)?;
    let view = blocking(svc, move |s| s.create_document(&doc)).await?;
    Ok((StatusCode::CREATED, view))
}

async fn segments(State(svc): Shared, Path(id): Path<String>) -> Reply<DocumentView> {
    blocking(svc, move |s| s.get_segments(&id)).await
}

async fn suggest(State(svc): Shared, Path((id, n)): Path<(String, usize)>, payload: Result<Json<SuggestRequest>, JsonRejection>) -> Reply<SuggestResponse> {
    let req = body(payload)?;
    blocking(svc, move |s| s.request_suggestions(&id, n, &req)).await
}

async fn edit(State(svc): Shared, Path((id, n)): Path<(String, usize)>, payload: Result<Json<EditRequest>, JsonRejection>) -> Reply<EditResponse> {
    let req = body(payload)?;
    blocking(svc, move |s| s.apply_edit(&id, n, &req)).await
}

#[derive(Debug, Deserialize)]
struct Bounds {
    start: usize,
    end: usize,
}

async fn heatmap(State(svc): Shared, Path((id, n)): Path<(String, usize)>, bounds: Result<Query<Bounds>, axum::extract::rejection::QueryRejection>) -> Reply<HeatmapView> {
    let Query(b) = bounds.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    blocking(svc, move |s| s.heatmap(&id, n, b.start, b.end)).await
}

async fn export(State(svc): Shared, Path(id): Path<String>) -> Reply<Interchange> {
    blocking(svc, move |s| s.export_document(&id)).await
}
