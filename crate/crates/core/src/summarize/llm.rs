use serde::{Deserialize, Serialize};

use crate::provider::{HttpEndpoint, ProviderError};

/// A text-completion model.
pub trait Llm: Send + Sync {
    fn id(&self) -> String;
    fn complete(&self, prompt: &str) -> Result<String, ProviderError>;
}

/// Returns the prompt unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct EchoLlm;

impl Llm for EchoLlm {
    fn id(&self) -> String {
        "echo".into()
    }

    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        Ok(prompt.to_string())
    }
}

#[derive(Serialize)]
struct SummarizeRequest<'a> {
    prompt: &'a str,
}

#[derive(Deserialize)]
struct SummarizeResponse {
    summary: String,
}

/// LLM behind `POST /summarize`.
#[derive(Debug, Clone)]
pub struct HttpLlm {
    endpoint: HttpEndpoint,
}

impl HttpLlm {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            endpoint: HttpEndpoint::new(url),
        }
    }

    pub fn with_endpoint(endpoint: HttpEndpoint) -> Self {
        Self { endpoint }
    }
}

impl Llm for HttpLlm {
    fn id(&self) -> String {
        self.endpoint.url().to_string()
    }

    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        let resp: SummarizeResponse = self.endpoint.post_json(&SummarizeRequest { prompt })?;
        Ok(resp.summary)
    }
}
