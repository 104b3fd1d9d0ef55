mod support;

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use litmini_core::sentiment::{HttpClassifier, LexiconClassifier};
use litmini_core::summarize::EchoLlm;
use litmini_service::{router, AppState, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

struct Fixture {
    _dir: tempfile::TempDir,
    config: ServiceConfig,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let config = support::write_fixture(dir.path());
    Fixture { _dir: dir, config }
}

fn app(config: &ServiceConfig) -> Router {
    router(AppState::load(config).unwrap())
}

async fn call(app: Router, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn get(app: Router, uri: &str) -> (StatusCode, Value) {
    let (status, body) = call(app, Request::get(uri).body(Body::empty()).unwrap()).await;
    (status, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

async fn post(app: Router, uri: &str, body: Value) -> (StatusCode, Value) {
    let req = Request::post(uri)
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let (status, body) = call(app, req).await;
    (status, serde_json::from_slice(&body).unwrap_or(Value::Null))
}

#[tokio::test]
async fn health_lists_models() {
    let f = fixture();
    let (status, body) = get(app(&f.config), "/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["sentences"], 520);
    assert_eq!(body["documents"], 20);
    assert_eq!(body["models"], json!(["PSTM_1", "PSTM_2"]));
}

#[tokio::test]
async fn search_returns_ranked_hits_with_context() {
    let f = fixture();
    let q = "/search?q=Karst%20aquifer%20tracer%20tests%20reveal%20rapid%20conduit%20flow&k=5&models=PSTM_1";
    let (status, body) = get(app(&f.config), q).await;
    assert_eq!(status, StatusCode::OK);
    let hits = body.as_array().unwrap();
    assert_eq!(hits.len(), 5);
    for (i, h) in hits.iter().enumerate() {
        assert_eq!(h["rank"], i + 1);
        assert!(h["ensemble_score"].as_f64().unwrap() > 0.7);
        assert!(h["context"]["center"]["text"].as_str().unwrap().starts_with("Karst"));
        assert_eq!(h["source"]["doc_id"], h["context"]["center"]["doc"]);
    }
}

#[tokio::test]
async fn search_keywords_with_no_match_is_empty() {
    let f = fixture();
    let (status, body) = get(app(&f.config), "/search?q=flood%20warning&keywords=zebra").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!([]));
}

#[tokio::test]
async fn unknown_model_is_400() {
    let f = fixture();
    let (status, body) = get(app(&f.config), "/search?q=flood&models=PSTM_9").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body, json!({"error": "unknown model"}));

    let (status, body) = post(app(&f.config), "/cluster", json!({"model": "PSTM_9"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "unknown model");
}

#[tokio::test]
async fn bad_cluster_params_are_400() {
    let f = fixture();
    let (status, body) = post(app(&f.config), "/cluster", json!({"model": "PSTM_1", "min_sim": 1.5})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().contains("min_similarity"));
}

#[tokio::test]
async fn cluster_defaults_and_per_year() {
    let f = fixture();
    let (status, body) = post(app(&f.config), "/cluster", json!({"model": "PSTM_1", "top_n": 11})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["total_points"], 500);
    assert_eq!(body["clusters"].as_array().unwrap().len(), 11);

    let (status, body) = post(app(&f.config), "/cluster", json!({"model": "PSTM_1", "per_year": true})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["entries"].as_array().unwrap().len(), 10);
    assert_eq!(body["entries"][0]["year"], 2015);
}

#[tokio::test]
async fn context_and_unknown_sid() {
    let f = fixture();
    let (status, body) = get(app(&f.config), "/context/3?before=2&after=0").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["center"]["sid"], 3);
    assert_eq!(body["before"].as_array().unwrap().len(), 2);
    assert_eq!(body["after"], json!([]));

    let (status, _) = get(app(&f.config), "/context/999999").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn captions_need_an_index() {
    let f = fixture();
    let (status, body) = get(app(&f.config), "/captions?q=study%20area%20map&k=3").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body.as_array().unwrap().len(), 3);

    let state = support::state_with(&f.config, Arc::new(LexiconClassifier), Arc::new(EchoLlm));
    let (status, _) = get(router(state), "/captions?q=map").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn open_describes_and_guards_sources() {
    let f = fixture();
    let doc = "/open/WR-2015-Synthetic%20study%201";
    let (status, body) = get(app(&f.config), doc).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["exists"], true);
    assert_eq!(body["servable"], false);

    let (status, _) = get(app(&f.config), &format!("{doc}?raw=true")).await;
    assert_eq!(status, StatusCode::FORBIDDEN);

    let mut servable = f.config.clone();
    servable.servable = true;
    let (status, bytes) = call(
        app(&servable),
        Request::get(format!("{doc}?raw=true")).body(Body::empty()).unwrap(),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(bytes).unwrap().starts_with("Unfortunately groundwater"));

    let (status, _) = get(app(&f.config), "/open/NOPE-2000-missing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = get(app(&f.config), "/open/..").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = get(app(&f.config), "/open/a%2F..%2Fetc").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sentiment_defaults() {
    let f = fixture();
    let (status, body) = post(app(&f.config), "/sentiment", json!({"task": "emotion"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["histogram"]["counts"], json!({"approval": 160, "disappointment": 120}));

    let (status, body) = post(
        app(&f.config),
        "/sentiment",
        json!({"task": "polarity", "model": "PSTM_2", "keywords": "declines"}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["histogram"]["counts"], json!({"negative": 80}));
    let sizes: Vec<u64> = body["clusters"]["negative"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["size"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![40, 40]);
}

#[tokio::test]
async fn unreachable_classifier_is_502() {
    let f = fixture();
    let classifier = Arc::new(HttpClassifier::new("http://127.0.0.1:1/classify"));
    let state = support::state_with(&f.config, classifier, Arc::new(EchoLlm));
    let (status, body) = post(router(state), "/sentiment", json!({"task": "emotion", "keywords": "karst"})).await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert!(body["error"].as_str().unwrap().contains("127.0.0.1:1"));
}

#[tokio::test]
async fn summarize_selection_rules() {
    let f = fixture();
    let (status, body) = post(app(&f.config), "/summarize", json!({"template": "challenge", "sids": [0, 1]})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(body["summary"].as_str().unwrap().starts_with("Please summarize the challenge.\n\n"));
    assert_eq!(body["provenance"]["sids"], json!([0, 1]));

    let (status, _) = post(app(&f.config), "/summarize", json!({"template": "challenge", "sids": []})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, _) = post(app(&f.config), "/summarize", json!({"template": "challenge"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = post(app(&f.config), "/summarize", json!({"template": "nope", "sids": [0]})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = post(
        app(&f.config),
        "/summarize",
        json!({"template": "topic50", "search": {"q": "groundwater storage declines beneath irrigated farmland during drought", "k": 3}}),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["provenance"]["sentence_count"], 3);
}

#[tokio::test]
async fn malformed_body_is_rejected() {
    let f = fixture();
    let req = Request::post("/cluster")
        .header(header::CONTENT_TYPE, "application/json")
        .body(Body::from("{not json"))
        .unwrap();
    let (status, _) = call(app(&f.config), req).await;
    assert!(status.is_client_error());
}
