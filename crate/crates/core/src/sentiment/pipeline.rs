use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{classify_emotions, classify_polarity, Classifier, EmotionLabel, Polarity, SentimentError};
use crate::cluster::{agglomerate_store, ClusterOutcome, ClusterParams, Linkage};
use crate::index::{KeywordQuery, SidSet, VectorStore};
use crate::ingest::{Corpus, SentenceKind, SentenceRecord};

/// Labels need strictly more supporting sentences than this to survive.
pub const DEFAULT_MIN_SUPPORT: usize = 100;
pub const DEFAULT_DROP: [&str; 2] = ["neutral", "gratitude"];
pub const DEFAULT_POLARITY_PARAMS: ClusterParams = ClusterParams {
    min_similarity: 0.85,
    min_cluster_count: 10,
    linkage: Linkage::Average,
};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionHistogram {
    pub counts: BTreeMap<String, usize>,
    pub total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmotionSummary {
    pub histogram: EmotionHistogram,
    /// Ascending sids per surviving label.
    pub sids: BTreeMap<String, Vec<u64>>,
}

/// Drops the labels in `drop`, then keeps labels with more than
/// `min_support` sentences.
pub fn emotion_pipeline(labeled: &[(u64, EmotionLabel)], min_support: usize, drop: &BTreeSet<String>) -> EmotionSummary {
    let mut ordered: Vec<&(u64, EmotionLabel)> = labeled.iter().collect();
    ordered.sort_by_key(|(sid, _)| *sid);
    let mut sids: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (sid, l) in ordered {
        if !drop.contains(&l.label) {
            sids.entry(l.label.clone()).or_default().push(*sid);
        }
    }
    sids.retain(|_, v| v.len() > min_support);
    let counts: BTreeMap<String, usize> = sids.iter().map(|(k, v)| (k.clone(), v.len())).collect();
    let total = counts.values().sum();
    EmotionSummary {
        histogram: EmotionHistogram { counts, total },
        sids,
    }
}

fn body_matching<'a>(corpus: &'a Corpus, keywords: Option<&KeywordQuery>) -> Vec<&'a SentenceRecord> {
    corpus
        .records()
        .iter()
        .filter(|r| r.kind == SentenceKind::Body && keywords.is_none_or(|q| q.matches(&r.text)))
        .collect()
}

/// Emotion labels for every body sentence matching `keywords`, in sid order.
pub fn label_emotions(
    corpus: &Corpus,
    classifier: &dyn Classifier,
    keywords: Option<&KeywordQuery>,
) -> Result<Vec<(u64, EmotionLabel)>, SentimentError> {
    let records = body_matching(corpus, keywords);
    let texts: Vec<String> = records.iter().map(|r| r.text.clone()).collect();
    let labels = classify_emotions(classifier, &texts)?;
    Ok(records.iter().map(|r| r.sid).zip(labels).collect())
}

/// Keyword filter, polarity classification, selection of one polarity and
/// clustering of that partition in `store`.
pub fn polarity_partition_and_cluster(
    corpus: &Corpus,
    classifier: &dyn Classifier,
    keywords: Option<&KeywordQuery>,
    polarity: Polarity,
    store: &VectorStore,
    params: &ClusterParams,
) -> Result<ClusterOutcome, SentimentError> {
    params.validate()?;
    let records = body_matching(corpus, keywords);
    let texts: Vec<String> = records.iter().map(|r| r.text.clone()).collect();
    let labels = classify_polarity(classifier, &texts)?;
    let selected: SidSet = records
        .iter()
        .zip(&labels)
        .filter(|(_, l)| l.label == polarity)
        .map(|(r, _)| r.sid)
        .collect();
    if selected.is_empty() {
        return Ok(ClusterOutcome {
            clusters: Vec::new(),
            pre_filter_count: 0,
            dropped: Vec::new(),
            merges: Vec::new(),
        });
    }
    Ok(agglomerate_store(store, Some(&selected), params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(counts: &[(&str, usize)]) -> Vec<(u64, EmotionLabel)> {
        let mut out = Vec::new();
        for (label, n) in counts {
            for _ in 0..*n {
                out.push((
                    out.len() as u64,
                    EmotionLabel {
                        label: label.to_string(),
                        score: 0.9,
                    },
                ));
            }
        }
        out
    }

    fn default_drop() -> BTreeSet<String> {
        DEFAULT_DROP.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn survivors_follow_strict_support() {
        let input = labeled(&[
            ("approval", 4787),
            ("disappointment", 1133),
            ("gratitude", 2000),
            ("neutral", 50000),
            ("curiosity", 99),
            ("optimism", 100),
            ("joy", 101),
        ]);
        let out = emotion_pipeline(&input, DEFAULT_MIN_SUPPORT, &default_drop());
        let expected: BTreeMap<String, usize> = [("approval", 4787), ("disappointment", 1133), ("joy", 101)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(out.histogram.counts, expected);
        assert_eq!(out.histogram.total, 4787 + 1133 + 101);
        assert_eq!(out.sids["joy"].len(), 101);
    }

    #[test]
    fn all_neutral_is_empty() {
        let out = emotion_pipeline(&labeled(&[("neutral", 500)]), DEFAULT_MIN_SUPPORT, &default_drop());
        assert_eq!(out, EmotionSummary::default());
    }

    #[test]
    fn identity_without_filters() {
        let out = emotion_pipeline(&labeled(&[("neutral", 3), ("joy", 1)]), 0, &BTreeSet::new());
        assert_eq!(out.histogram.counts.get("neutral"), Some(&3));
        assert_eq!(out.histogram.counts.get("joy"), Some(&1));
        assert_eq!(out.histogram.total, 4);
    }
}
