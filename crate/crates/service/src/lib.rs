//! Read-only HTTP API over a sentence corpus and its vector stores.
//!
//! Handlers are thin: each parses its request, runs the matching function
//! in [`ops`] on the blocking pool and serializes the result.

pub mod config;
pub mod doubles;
mod error;
pub mod ops;
mod state;

use std::future::Future;
use std::path::{Component, Path};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use litmini_core::api::{
    ClusterRequest, ContextQuery, OpenQuery, OpenResponse, SearchQuery, SentimentRequest, SummarizeRequest,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::ServiceConfig;
pub use error::ApiError;
pub use state::{classifier_from, llm_from, AppState};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("config: {0}")]
    Config(String),
    #[error("load: {0}")]
    Load(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

async fn blocking<T, F>(state: &AppState, f: F) -> Result<Json<T>, ApiError>
where
    T: Send + 'static,
    F: FnOnce(AppState) -> Result<T, ApiError> + Send + 'static,
{
    let _permit = state
        .limiter
        .clone()
        .acquire_owned()
        .await
        .map_err(|_| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "shutting down"))?;
    let state = state.clone();
    tokio::task::spawn_blocking(move || f(state))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map(Json)
}

async fn health(State(state): State<AppState>) -> impl IntoResponse {
    Json(ops::health(&state))
}

async fn search(State(state): State<AppState>, Query(q): Query<SearchQuery>) -> impl IntoResponse {
    blocking(&state, move |s| ops::search(&s, &q)).await
}

#[derive(Debug, Deserialize, Serialize)]
struct CaptionQuery {
    q: String,
    k: Option<usize>,
}

async fn captions(State(state): State<AppState>, Query(q): Query<CaptionQuery>) -> impl IntoResponse {
    blocking(&state, move |s| {
        let k = q.k.unwrap_or(s.defaults.k);
        ops::captions(&s, &q.q, k)
    })
    .await
}

async fn context(
    State(state): State<AppState>,
    UrlPath(sid): UrlPath<u64>,
    Query(q): Query<ContextQuery>,
) -> Result<impl IntoResponse, ApiError> {
    ops::context(&state, sid, q.before, q.after).map(Json)
}

fn safe_doc_id(doc_id: &str) -> bool {
    !doc_id.is_empty()
        && !doc_id.contains("..")
        && !doc_id.contains(['/', '\\'])
        && Path::new(doc_id).components().all(|c| matches!(c, Component::Normal(_)))
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("pdf") => "application/pdf",
        Some("txt") => "text/plain; charset=utf-8",
        Some("json") => "application/json",
        _ => "application/octet-stream",
    }
}

async fn open(
    State(state): State<AppState>,
    UrlPath(doc_id): UrlPath<String>,
    Query(q): Query<OpenQuery>,
) -> Result<Response, ApiError> {
    if !safe_doc_id(&doc_id) {
        return Err(ApiError::bad_request("invalid document id"));
    }
    let doc = state
        .corpus
        .doc(&doc_id)
        .ok_or_else(|| ApiError::not_found(format!("unknown document {doc_id:?}")))?;
    let exists = tokio::fs::metadata(&doc.source_path).await.is_ok_and(|m| m.is_file());
    if !q.raw {
        return Ok(Json(OpenResponse {
            doc_id: doc.doc_id.clone(),
            source_path: doc.source_path.clone(),
            exists,
            servable: state.servable,
        })
        .into_response());
    }
    if !state.servable {
        return Err(ApiError::new(StatusCode::FORBIDDEN, "source files are not servable"));
    }
    let bytes = tokio::fs::read(&doc.source_path)
        .await
        .map_err(|e| ApiError::not_found(format!("{}: {e}", doc.source_path.display())))?;
    Ok(([(header::CONTENT_TYPE, content_type(&doc.source_path))], bytes).into_response())
}

async fn cluster(State(state): State<AppState>, Json(req): Json<ClusterRequest>) -> impl IntoResponse {
    blocking(&state, move |s| ops::cluster(&s, &req)).await
}

async fn sentiment(State(state): State<AppState>, Json(req): Json<SentimentRequest>) -> impl IntoResponse {
    blocking(&state, move |s| ops::sentiment(&s, &req)).await
}

async fn summarize(State(state): State<AppState>, Json(req): Json<SummarizeRequest>) -> impl IntoResponse {
    blocking(&state, move |s| ops::summarize(&s, &req)).await
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/search", get(search))
        .route("/captions", get(captions))
        .route("/context/{sid}", get(context))
        .route("/open/{doc_id}", get(open))
        .route("/cluster", post(cluster))
        .route("/sentiment", post(sentiment))
        .route("/summarize", post(summarize))
        .with_state(state)
}

/// Serves `state` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}
