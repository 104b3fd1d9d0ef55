//! Shared plumbing for external model providers reached over HTTP/JSON.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Failure talking to an external (or builtin) provider.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("provider {provider} unavailable after {attempts} attempt(s): {detail}")]
    Unavailable {
        provider: String,
        attempts: u32,
        detail: String,
    },
    #[error("provider {provider} returned an invalid response: {detail}")]
    BadResponse { provider: String, detail: String },
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

/// Blocking JSON-over-HTTP endpoint with a bounded retry budget.
///
/// Transport failures and 5xx responses are retried; 4xx responses are not.
#[derive(Debug, Clone)]
pub struct HttpEndpoint {
    url: String,
    agent: ureq::Agent,
    retries: u32,
}

impl HttpEndpoint {
    pub fn new(url: impl Into<String>) -> Self {
        Self::with_policy(url, Duration::from_secs(60), 2)
    }

    pub fn with_policy(url: impl Into<String>, timeout: Duration, retries: u32) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            url: url.into(),
            agent,
            retries,
        }
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    /// POSTs `body` and decodes a 200 response as `R`.
    pub fn post_json<B: Serialize, R: DeserializeOwned>(&self, body: &B) -> Result<R, ProviderError> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            let detail = match self.agent.post(&self.url).send_json(body) {
                Ok(resp) => {
                    let status = resp.status().as_u16();
                    let mut body = resp.into_body();
                    if status == 200 {
                        return body.read_json::<R>().map_err(|e| ProviderError::BadResponse {
                            provider: self.url.clone(),
                            detail: e.to_string(),
                        });
                    }
                    let msg = body
                        .read_json::<ErrorBody>()
                        .map(|b| b.error)
                        .unwrap_or_else(|_| "no error body".to_string());
                    if status < 500 {
                        return Err(ProviderError::BadResponse {
                            provider: self.url.clone(),
                            detail: format!("HTTP {status}: {msg}"),
                        });
                    }
                    format!("HTTP {status}: {msg}")
                }
                Err(e) => e.to_string(),
            };
            if attempts > self.retries {
                return Err(ProviderError::Unavailable {
                    provider: self.url.clone(),
                    attempts,
                    detail,
                });
            }
            tracing::debug!(url = %self.url, attempts, %detail, "retrying provider call");
            std::thread::sleep(Duration::from_millis(50 * u64::from(attempts)));
        }
    }
}
