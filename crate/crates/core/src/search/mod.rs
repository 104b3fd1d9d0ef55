//! Ensemble semantic search: per-model inner-product scores averaged across
//! models, with per-sentence variance, per-model influence shares,
//! threshold selection, score bucketing and caption retrieval.

mod caption;
mod ensemble;
mod select;
mod stats;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::EmbedError;
use crate::index::IndexError;

pub use caption::{caption_search, CaptionHit};
pub use ensemble::{embed_query, ensemble_search, SearchFilters, SearchOutcome, SearchRequest, StoreSet};
pub use select::{score_buckets, threshold_select, Bucket, DEFAULT_BUCKET_EDGES, DEFAULT_MAX_N, DEFAULT_MIN_SCORE};
pub use stats::{mean, model_influence, score_variance, InfluenceReport, ScoreMatrix};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search corpus is empty")]
    EmptyCorpus,
    #[error("no candidate sentences match the filters")]
    NoCandidates,
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("at least one model is required")]
    NoModels,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("query text is empty")]
    EmptyQuery,
    #[error("no scores given")]
    EmptyScores,
    #[error("influence needs at least 2 models and 1 sentence with equal-length rows")]
    DegenerateMatrix,
    #[error("bucket edges must be strictly descending within [-1, 1]: {0}")]
    BadEdges(String),
    #[error("no caption index is available")]
    NoCaptionIndex,
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// One ranked result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchHit {
    pub sid: u64,
    pub per_model_scores: BTreeMap<String, f64>,
    pub ensemble_score: f64,
    pub variance: f64,
    pub rank: usize,
}
