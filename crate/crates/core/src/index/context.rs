use serde::{Deserialize, Serialize};

use super::IndexError;
use crate::ingest::{Corpus, SentenceRecord};

/// A sentence with its neighbours from the same document and kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    pub center: SentenceRecord,
    pub before: Vec<SentenceRecord>,
    pub after: Vec<SentenceRecord>,
}

/// Up to `n_before` preceding and `n_after` following sentences of `sid`,
/// cut at document boundaries.
pub fn get_context(
    corpus: &Corpus,
    sid: u64,
    n_before: usize,
    n_after: usize,
) -> Result<ContextWindow, IndexError> {
    let center = corpus.record(sid).ok_or(IndexError::UnknownSid(sid))?;
    let same_run = |r: &&SentenceRecord| r.doc_id == center.doc_id && r.kind == center.kind;

    // Records of one document and kind occupy consecutive sids in pos order.
    let mut before: Vec<SentenceRecord> = (0..sid)
        .rev()
        .take(n_before)
        .map_while(|s| corpus.record(s).filter(same_run))
        .cloned()
        .collect();
    before.reverse();
    let after = (sid + 1..)
        .take(n_after)
        .map_while(|s| corpus.record(s).filter(same_run))
        .cloned()
        .collect();
    Ok(ContextWindow {
        center: center.clone(),
        before,
        after,
    })
}
