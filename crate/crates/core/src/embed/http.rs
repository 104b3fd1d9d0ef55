use serde::{Deserialize, Serialize};

use super::registry::EmbedProvider;
use super::ModelSpec;
use crate::provider::{HttpEndpoint, ProviderError};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    model: &'a str,
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f32>>,
}

/// Embedding provider behind `POST /embed`.
#[derive(Debug, Clone)]
pub struct HttpEmbedder {
    endpoint: HttpEndpoint,
}

impl HttpEmbedder {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            endpoint: HttpEndpoint::new(url),
        }
    }

    pub fn with_endpoint(endpoint: HttpEndpoint) -> Self {
        Self { endpoint }
    }
}

impl EmbedProvider for HttpEmbedder {
    fn id(&self) -> String {
        self.endpoint.url().to_string()
    }

    fn embed(&self, model: &ModelSpec, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError> {
        let resp: EmbedResponse = self.endpoint.post_json(&EmbedRequest {
            model: &model.abbr,
            texts,
        })?;
        Ok(resp.vectors)
    }
}
