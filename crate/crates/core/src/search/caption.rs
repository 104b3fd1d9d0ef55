use serde::{Deserialize, Serialize};

use super::ensemble::embed_query;
use super::SearchError;
use crate::embed::Registry;
use crate::index::{top_k, SidSet, VectorStore};
use crate::ingest::{Corpus, SentenceKind, SentenceRecord};

/// An image retrieved through its caption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionHit {
    pub asset: Option<String>,
    pub caption: SentenceRecord,
    pub score: f64,
}

/// Ranks caption records against a query with the same semantics as
/// [`top_k`] restricted to captions.
pub fn caption_search(
    corpus: &Corpus,
    registry: &Registry,
    store: Option<&VectorStore>,
    query: &str,
    k: usize,
) -> Result<Vec<CaptionHit>, SearchError> {
    let store = store.ok_or(SearchError::NoCaptionIndex)?;
    let captions = SidSet::from(corpus.sids_of_kind(SentenceKind::Caption));
    if store.is_empty() || captions.is_empty() {
        return Err(SearchError::NoCaptionIndex);
    }
    if k == 0 {
        return Err(SearchError::ZeroK);
    }
    if query.trim().is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let q = embed_query(registry, store, query)?;
    let hits = top_k(store, &q, k, Some(&captions))?;
    Ok(hits
        .into_iter()
        .map(|(sid, score)| {
            let caption = corpus.record(sid).expect("caption sids come from the corpus").clone();
            CaptionHit {
                asset: caption.asset.clone(),
                caption,
                score,
            }
        })
        .collect())
}
