use super::{Classifier, RawLabel, Task, NEUTRAL};
use crate::provider::ProviderError;

/// First matching cue wins; cues are lowercase substrings.
const EMOTION_RULES: &[(&str, &str)] = &[
    ("unfortunately", "disappointment"),
    ("thank", "gratitude"),
    ("hope", "optimism"),
    ("promising", "optimism"),
    ("unclear", "confusion"),
    ("wonder", "curiosity"),
    ("recommend", "approval"),
    ("effective", "approval"),
    ("alarming", "fear"),
    ("surprising", "surprise"),
];

const NEGATIVE_CUES: &[&str] = &["declines", "threat"];
const POSITIVE_CUES: &[&str] = &["improves", "sustainable"];

const MATCH_SCORE: f64 = 0.9;
const DEFAULT_SCORE: f64 = 0.5;

/// Deterministic keyword classifier used in place of a neural model.
///
/// Emotion: "unfortunately" gives disappointment and "thank" gratitude (plus
/// a few more cues), anything else is neutral. Polarity: "declines" or
/// "threat" give negative, otherwise "improves" or "sustainable" give
/// positive, otherwise neutral.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexiconClassifier;

impl LexiconClassifier {
    pub fn emotion(text: &str) -> &'static str {
        let lower = text.to_lowercase();
        EMOTION_RULES
            .iter()
            .find(|(cue, _)| lower.contains(cue))
            .map_or(NEUTRAL, |(_, label)| label)
    }

    pub fn polarity(text: &str) -> &'static str {
        let lower = text.to_lowercase();
        if NEGATIVE_CUES.iter().any(|c| lower.contains(c)) {
            "negative"
        } else if POSITIVE_CUES.iter().any(|c| lower.contains(c)) {
            "positive"
        } else {
            "neutral"
        }
    }
}

impl Classifier for LexiconClassifier {
    fn id(&self) -> String {
        "builtin:lexicon".into()
    }

    fn classify(&self, task: Task, texts: &[String]) -> Result<Vec<RawLabel>, ProviderError> {
        Ok(texts
            .iter()
            .map(|t| {
                let label = match task {
                    Task::Emotion => Self::emotion(t),
                    Task::Polarity => Self::polarity(t),
                };
                let score = if label == NEUTRAL { DEFAULT_SCORE } else { MATCH_SCORE };
                RawLabel {
                    label: label.to_string(),
                    score,
                }
            })
            .collect())
    }
}
