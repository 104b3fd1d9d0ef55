use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{is_emotion_label, EmotionLabel, Polarity, PolarityLabel, SentimentError, Task};
use crate::provider::{HttpEndpoint, ProviderError};

/// Texts per provider call; batches are dispatched concurrently.
pub const BATCH_SIZE: usize = 64;

/// A label as it appears on the wire, before registry validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawLabel {
    pub label: String,
    pub score: f64,
}

/// A sentence classifier. One top label per text, in input order.
pub trait Classifier: Send + Sync {
    fn id(&self) -> String;
    fn classify(&self, task: Task, texts: &[String]) -> Result<Vec<RawLabel>, ProviderError>;
}

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    task: Task,
    texts: &'a [String],
}

#[derive(Deserialize)]
struct ClassifyResponse {
    labels: Vec<RawLabel>,
}

/// Classifier behind `POST /classify`.
#[derive(Debug, Clone)]
pub struct HttpClassifier {
    endpoint: HttpEndpoint,
}

impl HttpClassifier {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            endpoint: HttpEndpoint::new(url),
        }
    }

    pub fn with_endpoint(endpoint: HttpEndpoint) -> Self {
        Self { endpoint }
    }
}

impl Classifier for HttpClassifier {
    fn id(&self) -> String {
        self.endpoint.url().to_string()
    }

    fn classify(&self, task: Task, texts: &[String]) -> Result<Vec<RawLabel>, ProviderError> {
        let resp: ClassifyResponse = self.endpoint.post_json(&ClassifyRequest { task, texts })?;
        Ok(resp.labels)
    }
}

fn classify_raw(provider: &dyn Classifier, task: Task, texts: &[String]) -> Result<Vec<RawLabel>, SentimentError> {
    let batches: Vec<Vec<RawLabel>> = texts
        .par_chunks(BATCH_SIZE)
        .map(|chunk| {
            let labels = provider.classify(task, chunk)?;
            if labels.len() != chunk.len() {
                return Err(SentimentError::CountMismatch {
                    expected: chunk.len(),
                    got: labels.len(),
                });
            }
            Ok(labels)
        })
        .collect::<Result<_, SentimentError>>()?;
    let labels: Vec<RawLabel> = batches.into_iter().flatten().collect();
    if let Some(bad) = labels.iter().find(|l| !(0.0..=1.0).contains(&l.score)) {
        return Err(SentimentError::BadScore(bad.score));
    }
    Ok(labels)
}

/// One emotion label per text; labels outside the registry are rejected.
pub fn classify_emotions(provider: &dyn Classifier, texts: &[String]) -> Result<Vec<EmotionLabel>, SentimentError> {
    classify_raw(provider, Task::Emotion, texts)?
        .into_iter()
        .map(|l| {
            if is_emotion_label(&l.label) {
                Ok(EmotionLabel {
                    label: l.label,
                    score: l.score,
                })
            } else {
                Err(SentimentError::UnknownLabel(l.label))
            }
        })
        .collect()
}

/// One polarity label per text.
pub fn classify_polarity(provider: &dyn Classifier, texts: &[String]) -> Result<Vec<PolarityLabel>, SentimentError> {
    classify_raw(provider, Task::Polarity, texts)?
        .into_iter()
        .map(|l| {
            Ok(PolarityLabel {
                label: l.label.parse::<Polarity>()?,
                score: l.score,
            })
        })
        .collect()
}
