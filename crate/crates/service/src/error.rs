use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use litmini_core::api::ErrorBody;
use litmini_core::cluster::ClusterError;
use litmini_core::embed::EmbedError;
use litmini_core::index::IndexError;
use litmini_core::search::SearchError;
use litmini_core::sentiment::SentimentError;
use litmini_core::summarize::SummarizeError;

/// An HTTP error with a `{"error": ...}` body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    pub fn unknown_model() -> Self {
        Self::bad_request("unknown model")
    }

    fn internal(message: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message.to_string())
    }

    fn upstream(message: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::BAD_GATEWAY, message.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.message })).into_response()
    }
}

impl From<EmbedError> for ApiError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::UnknownModel(_) => Self::unknown_model(),
            EmbedError::EmptyText { .. } => Self::bad_request(e.to_string()),
            EmbedError::Provider(_)
            | EmbedError::DimensionMismatch { .. }
            | EmbedError::CountMismatch { .. }
            | EmbedError::NonFinite => Self::upstream(e),
            _ => Self::internal(e),
        }
    }
}

impl From<IndexError> for ApiError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::Embed(inner) => inner.into(),
            IndexError::ZeroK | IndexError::EmptyQuery | IndexError::UnknownSid(_) => Self::bad_request(e.to_string()),
            _ => Self::internal(e),
        }
    }
}

impl From<SearchError> for ApiError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::UnknownModel(_) => Self::unknown_model(),
            SearchError::EmptyCorpus | SearchError::NoCaptionIndex => Self::not_found(e.to_string()),
            SearchError::Embed(inner) => inner.into(),
            SearchError::Index(inner) => inner.into(),
            SearchError::ZeroK
            | SearchError::EmptyQuery
            | SearchError::NoModels
            | SearchError::BadEdges(_)
            | SearchError::NoCandidates => Self::bad_request(e.to_string()),
            SearchError::EmptyScores | SearchError::DegenerateMatrix => Self::internal(e),
        }
    }
}

impl From<ClusterError> for ApiError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::BadParams(_) => Self::bad_request(e.to_string()),
            ClusterError::TooLarge { .. } => Self::new(StatusCode::PAYLOAD_TOO_LARGE, e.to_string()),
            ClusterError::Index(inner) => inner.into(),
            _ => Self::internal(e),
        }
    }
}

impl From<SentimentError> for ApiError {
    fn from(e: SentimentError) -> Self {
        match e {
            SentimentError::Cluster(inner) => inner.into(),
            _ => Self::upstream(e),
        }
    }
}

impl From<SummarizeError> for ApiError {
    fn from(e: SummarizeError) -> Self {
        match e {
            SummarizeError::EmptySelection => Self::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            SummarizeError::UnknownTemplate(_) | SummarizeError::BadTemplate(_) | SummarizeError::UnknownSid(_) => {
                Self::bad_request(e.to_string())
            }
            SummarizeError::Provider(_) => Self::upstream(e),
            SummarizeError::Cluster(inner) => inner.into(),
            SummarizeError::Parallelism(_) => Self::internal(e),
        }
    }
}
