use std::fmt;
use std::process::ExitCode;

use litmini_client::ClientError;
use litmini_core::embed::EmbedError;
use litmini_core::index::IndexError;
use litmini_core::ingest::IngestError;
use litmini_core::search::SearchError;
use litmini_core::sentiment::SentimentError;
use litmini_core::summarize::SummarizeError;
use litmini_service::{ApiError, ServiceError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage = 1,
    Data = 2,
    Provider = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl fmt::Display) -> Self {
        Self {
            kind: Kind::Usage,
            message: message.to_string(),
        }
    }

    pub fn data(message: impl fmt::Display) -> Self {
        Self {
            kind: Kind::Data,
            message: message.to_string(),
        }
    }

    pub fn provider(message: impl fmt::Display) -> Self {
        Self {
            kind: Kind::Provider,
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        Self::data(e)
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::Provider(_) => Self::provider(e),
            EmbedError::UnknownModel(_) | EmbedError::Config(_) | EmbedError::InvalidSpec(_) => Self::usage(e),
            _ => Self::data(e),
        }
    }
}

impl From<IndexError> for CliError {
    fn from(e: IndexError) -> Self {
        match e {
            IndexError::Embed(inner) => inner.into(),
            IndexError::ZeroK | IndexError::EmptyQuery => Self::usage(e),
            _ => Self::data(e),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Embed(inner) => inner.into(),
            SearchError::Index(inner) => inner.into(),
            SearchError::UnknownModel(_)
            | SearchError::NoModels
            | SearchError::ZeroK
            | SearchError::EmptyQuery
            | SearchError::BadEdges(_) => Self::usage(e),
            _ => Self::data(e),
        }
    }
}

impl From<SentimentError> for CliError {
    fn from(e: SentimentError) -> Self {
        match e {
            SentimentError::Cluster(_) => Self::data(e),
            _ => Self::provider(e),
        }
    }
}

impl From<SummarizeError> for CliError {
    fn from(e: SummarizeError) -> Self {
        match e {
            SummarizeError::Provider(_) => Self::provider(e),
            SummarizeError::UnknownTemplate(_) | SummarizeError::BadTemplate(_) => Self::usage(e),
            _ => Self::data(e),
        }
    }
}

impl From<ApiError> for CliError {
    fn from(e: ApiError) -> Self {
        match e.status.as_u16() {
            400 => Self::usage(e.message),
            502 | 503 => Self::provider(e.message),
            _ => Self::data(e.message),
        }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match &e {
            ClientError::Transport(_) => Self::provider(e),
            ClientError::Status { status, .. } => match status.as_u16() {
                400 => Self::usage(e),
                502 | 503 => Self::provider(e),
                _ => Self::data(e),
            },
        }
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Config(_) => Self::usage(e),
            _ => Self::data(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::data(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::data(e)
    }
}
