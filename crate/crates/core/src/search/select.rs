use serde::{Deserialize, Serialize};

use super::{SearchError, SearchHit};

/// Relevance cut-off; selection keeps scores strictly above it.
pub const DEFAULT_MIN_SCORE: f64 = 0.7;
/// Largest selection handed to summarization.
pub const DEFAULT_MAX_N: usize = 5000;
pub const DEFAULT_BUCKET_EDGES: [f64; 4] = [1.0, 0.8, 0.75, 0.7];

const EDGE_SLACK: f64 = 1e-9;

/// Hits with `ensemble_score > min_score`, truncated to `max_n`.
pub fn threshold_select(hits: &[SearchHit], min_score: f64, max_n: usize) -> Vec<SearchHit> {
    hits.iter()
        .filter(|h| h.ensemble_score > min_score)
        .take(max_n)
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Counts scores into `[edges[i+1], edges[i])`, except that the top bucket
/// is closed and also absorbs anything above `edges[0]` (unit-vector inner
/// products can exceed 1 by rounding).
pub fn score_buckets(scores: &[f64], edges: &[f64]) -> Result<Vec<Bucket>, SearchError> {
    if edges.len() < 2 {
        return Err(SearchError::BadEdges("need at least two edges".into()));
    }
    if edges.iter().any(|e| !e.is_finite() || *e < -1.0 - EDGE_SLACK || *e > 1.0 + EDGE_SLACK) {
        return Err(SearchError::BadEdges(format!("{edges:?}")));
    }
    if edges.windows(2).any(|w| w[0] <= w[1]) {
        return Err(SearchError::BadEdges(format!("{edges:?} not strictly descending")));
    }
    let mut buckets: Vec<Bucket> = edges
        .windows(2)
        .map(|w| Bucket {
            lo: w[1],
            hi: w[0],
            count: 0,
        })
        .collect();
    for &s in scores {
        if let Some(b) = buckets.iter_mut().enumerate().find_map(|(i, b)| {
            let inside = if i == 0 { s >= b.lo } else { s >= b.lo && s < b.hi };
            inside.then_some(b)
        }) {
            b.count += 1;
        }
    }
    Ok(buckets)
}
