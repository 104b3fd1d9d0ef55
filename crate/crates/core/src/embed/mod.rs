//! Embedding models: the registry, the vector type and the providers that
//! turn text into vectors.

mod hash;
mod http;
mod registry;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::provider::ProviderError;

pub use hash::{hash_embed, HashEmbedder};
pub use http::HttpEmbedder;
pub use registry::{
    embed_batch, truncate_tokens, EmbedProvider, ModelEntry, ProviderRef, Registry, RegistryEntryConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("unknown model {0:?}")]
    UnknownModel(String),
    #[error("model {0:?} is already registered")]
    DuplicateModel(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("model {model} produced vectors of width {got}, expected {expected}")]
    DimensionMismatch {
        model: String,
        expected: usize,
        got: usize,
    },
    #[error("provider returned {got} vectors for {expected} texts")]
    CountMismatch { expected: usize, got: usize },
    #[error("text {index} is empty")]
    EmptyText { index: usize },
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("vector contains non-finite values")]
    NonFinite,
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("registry config: {0}")]
    Config(String),
}

/// Registry entry describing one embedding model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub full_name: String,
    pub abbr: String,
    pub max_seq_len: usize,
    pub dim: usize,
    pub size_params: u64,
}

impl ModelSpec {
    pub fn new(full_name: &str, abbr: &str, max_seq_len: usize, dim: usize, size_params: u64) -> Self {
        Self {
            full_name: full_name.to_string(),
            abbr: abbr.to_string(),
            max_seq_len,
            dim,
            size_params,
        }
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.abbr.is_empty() {
            return Err(EmbedError::InvalidSpec("empty abbreviation".into()));
        }
        if self.dim == 0 || self.max_seq_len == 0 {
            return Err(EmbedError::InvalidSpec(format!(
                "{}: dim and max_seq_len must be at least 1",
                self.abbr
            )));
        }
        Ok(())
    }

    /// The six sentence-transformer models of the reference setup.
    pub fn reference_models() -> Vec<ModelSpec> {
        vec![
            Self::new("all-MiniLM-L6-v2", "PSTM_1", 256, 384, 22_700_000),
            Self::new("all-MiniLM-L12-v2", "PSTM_2", 256, 384, 33_400_000),
            Self::new("all-mpnet-base-v2", "PSTM_3", 384, 768, 109_000_000),
            Self::new("mxbai-embed-large-v1", "PSTM_4", 512, 1024, 335_000_000),
            Self::new("multilingual-e5-large-instruct", "PSTM_5", 512, 1024, 560_000_000),
            Self::new("SFR-Embedding-Mistral", "PSTM_6", 4096, 4096, 7_110_000_000),
        ]
    }
}

/// A finite dense vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f32>", into = "Vec<f32>")]
pub struct Vector(Vec<f32>);

impl Vector {
    pub fn new(values: Vec<f32>) -> Result<Self, EmbedError> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(Self(values))
        } else {
            Err(EmbedError::NonFinite)
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f32> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt()
    }

    pub fn scale(&self, factor: f32) -> Result<Self, EmbedError> {
        Self::new(self.0.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f32>> for Vector {
    type Error = EmbedError;

    fn try_from(values: Vec<f32>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<Vector> for Vec<f32> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

/// Scales `v` to unit L2 norm.
pub fn normalize(v: &Vector) -> Result<Vector, EmbedError> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    Ok(Vector(v.0.iter().map(|&x| (f64::from(x) / norm) as f32).collect()))
}
