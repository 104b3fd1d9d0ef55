//! Emotion and polarity classification and the aggregation pipeline over it.

mod classify;
mod lexicon;
mod pipeline;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::ClusterError;
use crate::provider::ProviderError;

pub use classify::{classify_emotions, classify_polarity, Classifier, HttpClassifier, RawLabel, BATCH_SIZE};
pub use lexicon::LexiconClassifier;
pub use pipeline::{
    emotion_pipeline, label_emotions, polarity_partition_and_cluster, EmotionHistogram, EmotionSummary,
    DEFAULT_DROP, DEFAULT_MIN_SUPPORT, DEFAULT_POLARITY_PARAMS,
};

/// The 27 fine-grained emotion classes.
pub const EMOTIONS: [&str; 27] = [
    "admiration",
    "amusement",
    "anger",
    "annoyance",
    "approval",
    "caring",
    "confusion",
    "curiosity",
    "desire",
    "disappointment",
    "disapproval",
    "disgust",
    "embarrassment",
    "excitement",
    "fear",
    "gratitude",
    "grief",
    "joy",
    "love",
    "nervousness",
    "optimism",
    "pride",
    "realization",
    "relief",
    "remorse",
    "sadness",
    "surprise",
];

/// Reserved label for sentences without a dominant emotion.
pub const NEUTRAL: &str = "neutral";

pub fn is_emotion_label(label: &str) -> bool {
    label == NEUTRAL || EMOTIONS.contains(&label)
}

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label score {0} outside [0, 1]")]
    BadScore(f64),
    #[error("provider returned {got} labels for {expected} texts")]
    CountMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Emotion,
    Polarity,
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "emotion" => Ok(Self::Emotion),
            "polarity" => Ok(Self::Polarity),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Positive,
    Neutral,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Negative => "negative",
            Self::Positive => "positive",
            Self::Neutral => "neutral",
        }
    }
}

impl std::str::FromStr for Polarity {
    type Err = SentimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "negative" => Ok(Self::Negative),
            "positive" => Ok(Self::Positive),
            "neutral" => Ok(Self::Neutral),
            other => Err(SentimentError::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionLabel {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityLabel {
    pub label: Polarity,
    pub score: f64,
}
