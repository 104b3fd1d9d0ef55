//! Per-model vector stores, the keyword prefilter, exact top-k search and
//! context windows.

mod context;
mod keyword;
mod store;
mod topk;

use std::path::PathBuf;

use thiserror::Error;

use crate::embed::EmbedError;

pub use context::{get_context, ContextWindow};
pub use keyword::{keyword_filter, KeywordQuery, MatchMode};
pub use store::{build_store, VectorStore, FORMAT_VERSION, MAGIC};
pub use topk::{dot, scores_for, top_k, SidSet};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("query has dimension {got}, store has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("unknown sid {0}")]
    UnknownSid(u64),
    #[error("keyword query needs at least one non-empty group of non-empty literals")]
    EmptyQuery,
    #[error("bad magic at offset {offset}: expected \"MLMV\", found {found:?}")]
    BadMagic { offset: u64, found: Vec<u8> },
    #[error("unsupported store version {version} at offset {offset}")]
    UnsupportedVersion { offset: u64, version: u32 },
    #[error("truncated store: {what} at offset {offset} needs {needed} bytes, {available} available")]
    Truncated {
        what: &'static str,
        offset: u64,
        needed: u64,
        available: u64,
    },
    #[error("{extra} trailing bytes after offset {offset}")]
    TrailingBytes { offset: u64, extra: u64 },
    #[error("invalid store at offset {offset}: {detail}")]
    Corrupt { offset: u64, detail: String },
    #[error("invalid store contents: {0}")]
    Invalid(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
