use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{agglomerate, Cluster, ClusterError, ClusterParams};
use crate::index::{dot, IndexError, KeywordQuery, VectorStore};
use crate::ingest::{Corpus, SentenceKind, SentenceRecord};

/// The first `n` clusters, which are already in size order.
pub fn top_clusters(clusters: &[Cluster], n: usize) -> Vec<Cluster> {
    clusters.iter().take(n).cloned().collect()
}

/// Member sids closest to the centroid, ties broken by ascending sid.
pub fn representative_sids<'a>(
    cluster: &Cluster,
    lookup: impl Fn(u64) -> Option<&'a [f32]>,
    m: usize,
) -> Result<Vec<u64>, ClusterError> {
    let centroid = cluster.centroid.as_slice();
    let mut scored: Vec<(f64, u64)> = cluster
        .member_sids
        .iter()
        .map(|&sid| {
            let v = lookup(sid).ok_or(IndexError::UnknownSid(sid))?;
            if v.len() != centroid.len() {
                return Err(ClusterError::DimensionMismatch);
            }
            Ok((dot(v, centroid), sid))
        })
        .collect::<Result<_, ClusterError>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(m).map(|(_, sid)| sid).collect())
}

/// The `m` most central member sentences of `cluster`.
pub fn representatives(
    cluster: &Cluster,
    store: &VectorStore,
    corpus: &Corpus,
    m: usize,
) -> Result<Vec<SentenceRecord>, ClusterError> {
    representative_sids(cluster, |sid| store.vector_of(sid), m)?
        .into_iter()
        .map(|sid| {
            corpus
                .record(sid)
                .cloned()
                .ok_or(ClusterError::Index(IndexError::UnknownSid(sid)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearEntry {
    pub year: i32,
    /// Matching sentences for the year, before clustering.
    pub total_points: usize,
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub model: String,
    pub entries: Vec<YearEntry>,
}

/// Clusters each publication year's matching body sentences separately and
/// keeps the `top_n` largest clusters per year.
///
/// Years run contiguously from the corpus's earliest to latest document;
/// years with no matches appear with zero points.
pub fn yearly_trends(
    corpus: &Corpus,
    store: &VectorStore,
    keywords: Option<&KeywordQuery>,
    params: &ClusterParams,
    top_n: usize,
) -> Result<TrendSeries, ClusterError> {
    params.validate()?;
    let (Some(first), Some(last)) = (
        corpus.docs().iter().map(|d| d.year).min(),
        corpus.docs().iter().map(|d| d.year).max(),
    ) else {
        return Err(ClusterError::EmptyInput);
    };

    let mut by_year: BTreeMap<i32, Vec<(u64, &[f32])>> = (first..=last).map(|y| (y, Vec::new())).collect();
    for r in corpus.records() {
        if r.kind != SentenceKind::Body || !keywords.is_none_or(|q| q.matches(&r.text)) {
            continue;
        }
        if let Some(v) = store.vector_of(r.sid) {
            by_year.entry(r.year).or_default().push((r.sid, v));
        }
    }

    let entries = by_year
        .into_par_iter()
        .map(|(year, points)| {
            let clusters = if points.is_empty() {
                Vec::new()
            } else {
                top_clusters(&agglomerate(&points, params)?.clusters, top_n)
            };
            Ok(YearEntry {
                year,
                total_points: points.len(),
                clusters,
            })
        })
        .collect::<Result<Vec<_>, ClusterError>>()?;

    Ok(TrendSeries {
        model: store.model_abbr().to_string(),
        entries,
    })
}
