//! Threshold-driven agglomerative clustering of sentence embeddings and
//! the per-year, top-n and representative views built on it.

mod agglomerate;
mod projection;
mod trends;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::Vector;
use crate::index::IndexError;

pub use agglomerate::{agglomerate, agglomerate_store, ClusterOutcome, MergeStep, MAX_POINTS, TIE_TOLERANCE};
pub use projection::{project_2d, scatter_tsv};
pub use trends::{representative_sids, representatives, top_clusters, yearly_trends, TrendSeries, YearEntry};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("nothing to cluster")]
    EmptyInput,
    #[error("{n} points exceed the clustering limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("sid {0} appears more than once")]
    DuplicateSid(u64),
    #[error("vectors have mismatched dimensions")]
    DimensionMismatch,
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Mean pairwise similarity between members.
    #[default]
    Average,
    /// Minimum pairwise similarity between members.
    Complete,
}

impl std::str::FromStr for Linkage {
    type Err = ClusterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "average" => Ok(Self::Average),
            "complete" => Ok(Self::Complete),
            other => Err(ClusterError::BadParams(format!("unknown linkage {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    pub min_similarity: f64,
    pub min_cluster_count: usize,
    #[serde(default)]
    pub linkage: Linkage,
}

impl ClusterParams {
    pub fn new(min_similarity: f64, min_cluster_count: usize) -> Self {
        Self {
            min_similarity,
            min_cluster_count,
            linkage: Linkage::Average,
        }
    }

    pub fn with_linkage(self, linkage: Linkage) -> Self {
        Self { linkage, ..self }
    }

    pub fn validate(&self) -> Result<(), ClusterError> {
        if !self.min_similarity.is_finite() || !(-1.0..=1.0).contains(&self.min_similarity) {
            return Err(ClusterError::BadParams(format!(
                "min_similarity {} not in [-1, 1]",
                self.min_similarity
            )));
        }
        if self.min_cluster_count == 0 {
            return Err(ClusterError::BadParams("min_cluster_count must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self::new(0.7, 10)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub cluster_id: usize,
    pub member_sids: Vec<u64>,
    pub centroid: Vector,
    pub size: usize,
}
