//! Provider test doubles served over HTTP: `/embed` backed by the hash
//! embedder of the reference registry, `/classify` by the lexicon
//! classifier and `/summarize` echoing its prompt.

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use litmini_core::api::ErrorBody;
use litmini_core::sentiment::{Classifier, LexiconClassifier, RawLabel, Task};
use litmini_core::Registry;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Deserialize)]
struct EmbedRequest {
    model: String,
    texts: Vec<String>,
}

#[derive(Serialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f32>>,
}

#[derive(Deserialize)]
struct ClassifyRequest {
    task: Task,
    texts: Vec<String>,
}

#[derive(Serialize)]
struct ClassifyResponse {
    labels: Vec<RawLabel>,
}

#[derive(Deserialize)]
struct SummarizeRequest {
    prompt: String,
}

#[derive(Serialize)]
struct SummarizeResponse {
    summary: String,
}

type Failure = (StatusCode, Json<ErrorBody>);

fn fail(status: StatusCode, error: impl ToString) -> Failure {
    (status, Json(ErrorBody { error: error.to_string() }))
}

async fn embed(State(registry): State<Arc<Registry>>, Json(req): Json<EmbedRequest>) -> Result<Json<EmbedResponse>, Failure> {
    let entry = registry.get(&req.model).map_err(|e| fail(StatusCode::BAD_REQUEST, e))?;
    let vectors = entry
        .provider
        .embed(&entry.spec, &req.texts)
        .map_err(|e| fail(StatusCode::INTERNAL_SERVER_ERROR, e))?;
    Ok(Json(EmbedResponse { vectors }))
}

async fn classify(Json(req): Json<ClassifyRequest>) -> Result<Json<ClassifyResponse>, Failure> {
    let labels = LexiconClassifier
        .classify(req.task, &req.texts)
        .map_err(|e| fail(StatusCode::INTERNAL_SERVER_ERROR, e))?;
    Ok(Json(ClassifyResponse { labels }))
}

async fn summarize(Json(req): Json<SummarizeRequest>) -> Json<SummarizeResponse> {
    Json(SummarizeResponse { summary: req.prompt })
}

pub fn router() -> Router {
    Router::new()
        .route("/embed", post(embed))
        .route("/classify", post(classify))
        .route("/summarize", post(summarize))
        .with_state(Arc::new(Registry::reference()))
}

/// Serves the doubles on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    tracing::info!(addr = %listener.local_addr()?, "provider doubles listening");
    axum::serve(listener, router()).with_graceful_shutdown(shutdown).await
}
