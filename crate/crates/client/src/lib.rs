//! Async client for the litmini HTTP service.

use litmini_core::api::{
    ApiHit, ClusterRequest, ClusterResponse, ErrorBody, Health, OpenResponse, SearchQuery, SentimentRequest,
    SentimentResponse, SummarizeRequest,
};
use litmini_core::index::ContextWindow;
use litmini_core::search::CaptionHit;
use litmini_core::summarize::Summary;
use reqwest::{RequestBuilder, StatusCode};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    /// The service answered with a non-success status.
    #[error("HTTP {status}: {message}")]
    Status { status: StatusCode, message: String },
    #[error("request failed: {0}")]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    pub fn status(&self) -> Option<StatusCode> {
        match self {
            Self::Status { status, .. } => Some(*status),
            Self::Transport(e) => e.status(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Self::with_http(base, reqwest::Client::new())
    }

    pub fn with_http(base: impl Into<String>, http: reqwest::Client) -> Self {
        let base = base.into().trim_end_matches('/').to_string();
        Self { base, http }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    async fn send(req: RequestBuilder) -> Result<reqwest::Response, ClientError> {
        let resp = req.send().await?;
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let text = resp.text().await.unwrap_or_default();
        let message = serde_json::from_str::<ErrorBody>(&text).map(|b| b.error).unwrap_or(text);
        Err(ClientError::Status { status, message })
    }

    async fn get_json<T: DeserializeOwned, Q: Serialize + ?Sized>(&self, path: &str, query: &Q) -> Result<T, ClientError> {
        Ok(Self::send(self.http.get(self.url(path)).query(query)).await?.json().await?)
    }

    async fn post_json<T: DeserializeOwned, B: Serialize + ?Sized>(&self, path: &str, body: &B) -> Result<T, ClientError> {
        Ok(Self::send(self.http.post(self.url(path)).json(body)).await?.json().await?)
    }

    pub async fn health(&self) -> Result<Health, ClientError> {
        self.get_json("/health", &()).await
    }

    pub async fn search(&self, query: &SearchQuery) -> Result<Vec<ApiHit>, ClientError> {
        self.get_json("/search", query).await
    }

    pub async fn captions(&self, q: &str, k: Option<usize>) -> Result<Vec<CaptionHit>, ClientError> {
        self.get_json("/captions", &[("q", Some(q.to_string())), ("k", k.map(|k| k.to_string()))])
            .await
    }

    pub async fn context(&self, sid: u64, before: Option<usize>, after: Option<usize>) -> Result<ContextWindow, ClientError> {
        self.get_json(&format!("/context/{sid}"), &[("before", before), ("after", after)])
            .await
    }

    pub async fn open(&self, doc_id: &str) -> Result<OpenResponse, ClientError> {
        self.get_json(&format!("/open/{doc_id}"), &()).await
    }

    /// The source file's bytes; needs a servable corpus.
    pub async fn open_raw(&self, doc_id: &str) -> Result<Vec<u8>, ClientError> {
        let resp = Self::send(self.http.get(self.url(&format!("/open/{doc_id}"))).query(&[("raw", "true")])).await?;
        Ok(resp.bytes().await?.to_vec())
    }

    pub async fn cluster(&self, req: &ClusterRequest) -> Result<ClusterResponse, ClientError> {
        self.post_json("/cluster", req).await
    }

    pub async fn sentiment(&self, req: &SentimentRequest) -> Result<SentimentResponse, ClientError> {
        self.post_json("/sentiment", req).await
    }

    pub async fn summarize(&self, req: &SummarizeRequest) -> Result<Summary, ClientError> {
        self.post_json("/summarize", req).await
    }
}
