//! JSON bodies exchanged between the HTTP service, its client and the CLI.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cluster::{Cluster, ClusterParams, Linkage, TrendSeries};
use crate::index::{get_context, ContextWindow, KeywordQuery, MatchMode};
use crate::ingest::Corpus;
use crate::search::{
    Bucket, InfluenceReport, SearchFilters, SearchHit, SearchRequest, DEFAULT_MAX_N, DEFAULT_MIN_SCORE,
};
use crate::sentiment::{EmotionHistogram, Polarity, Task, DEFAULT_MIN_SUPPORT, DEFAULT_POLARITY_PARAMS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

/// Fallbacks for search parameters a request leaves out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchDefaults {
    pub k: usize,
    pub min_score: f64,
    pub max_n: usize,
    pub n_before: usize,
    pub n_after: usize,
}

impl Default for SearchDefaults {
    fn default() -> Self {
        Self {
            k: 100,
            min_score: DEFAULT_MIN_SCORE,
            max_n: DEFAULT_MAX_N,
            n_before: 1,
            n_after: 1,
        }
    }
}

/// Search parameters, used both as a query string and as a JSON body.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub q: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Comma-separated model abbreviations; all loaded models when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<String>,
    /// Keyword expression: `,` separates alternatives, `+` separates required groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub journal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year_from: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year_to: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardize: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
}

/// A [`SearchQuery`] with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSearch {
    pub request: SearchRequest,
    pub min_score: f64,
    pub max_n: usize,
}

impl SearchQuery {
    pub fn new(q: impl Into<String>) -> Self {
        Self {
            q: q.into(),
            ..Self::default()
        }
    }

    pub fn resolve(&self, defaults: &SearchDefaults) -> Result<ResolvedSearch, String> {
        let mut request = SearchRequest::new(self.q.clone(), self.k.unwrap_or(defaults.k));
        request.models = split_list(self.models.as_deref());
        request.keywords = parse_keywords(self.keywords.as_deref())?;
        request.filters = SearchFilters {
            journal: self.journal.clone(),
            year_from: self.year_from,
            year_to: self.year_to,
        };
        request.standardize = self.standardize.unwrap_or(false);
        let min_score = self.min_score.unwrap_or(defaults.min_score);
        if !min_score.is_finite() {
            return Err("min_score must be finite".into());
        }
        Ok(ResolvedSearch {
            request,
            min_score,
            max_n: self.max_n.unwrap_or(defaults.max_n),
        })
    }
}

/// Comma-separated list, blanks dropped.
pub fn split_list(s: Option<&str>) -> Vec<String> {
    s.map(|s| {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::to_string)
            .collect()
    })
    .unwrap_or_default()
}

/// `None` or blank means no keyword filter.
pub fn parse_keywords(expr: Option<&str>) -> Result<Option<KeywordQuery>, String> {
    match expr.map(str::trim) {
        None | Some("") => Ok(None),
        Some(e) => KeywordQuery::parse(e, MatchMode::Substring)
            .map(Some)
            .map_err(|e| e.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRef {
    pub doc_id: String,
    pub source_path: PathBuf,
}

/// A ranked hit with its sentence, neighbours and source document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiHit {
    #[serde(flatten)]
    pub hit: SearchHit,
    pub context: ContextWindow,
    pub source: SourceRef,
}

/// Attaches context windows and source descriptors to hits.
pub fn hydrate_hits(corpus: &Corpus, hits: Vec<SearchHit>, n_before: usize, n_after: usize) -> Vec<ApiHit> {
    hits.into_iter()
        .map(|hit| {
            let context = get_context(corpus, hit.sid, n_before, n_after).expect("hits come from the corpus");
            let doc = corpus
                .doc(&context.center.doc_id)
                .expect("every record's document is in the corpus");
            ApiHit {
                source: SourceRef {
                    doc_id: doc.doc_id.clone(),
                    source_path: doc.source_path.clone(),
                },
                context,
                hit,
            }
        })
        .collect()
}

/// What the CLI prints for `search --json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchEnvelope {
    pub query: String,
    pub hits: Vec<ApiHit>,
    #[serde(default)]
    pub influence: Option<InfluenceReport>,
    #[serde(default)]
    pub buckets: Vec<Bucket>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextQuery {
    pub before: Option<usize>,
    pub after: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenQuery {
    /// Stream the file instead of describing it.
    #[serde(default)]
    pub raw: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenResponse {
    pub doc_id: String,
    pub source_path: PathBuf,
    pub exists: bool,
    pub servable: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterRequest {
    #[serde(default)]
    pub keywords: Option<String>,
    pub model: String,
    #[serde(default)]
    pub min_sim: Option<f64>,
    #[serde(default)]
    pub min_count: Option<usize>,
    #[serde(default)]
    pub linkage: Option<Linkage>,
    #[serde(default)]
    pub top_n: Option<usize>,
    #[serde(default)]
    pub per_year: bool,
}

impl ClusterRequest {
    pub fn params(&self) -> ClusterParams {
        let d = ClusterParams::default();
        ClusterParams {
            min_similarity: self.min_sim.unwrap_or(d.min_similarity),
            min_cluster_count: self.min_count.unwrap_or(d.min_cluster_count),
            linkage: self.linkage.unwrap_or(d.linkage),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatClusters {
    pub model: String,
    pub total_points: usize,
    pub pre_filter_count: usize,
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClusterResponse {
    Flat(FlatClusters),
    Yearly(TrendSeries),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentRequest {
    #[serde(default)]
    pub keywords: Option<String>,
    pub task: Task,
    #[serde(default)]
    pub min_support: Option<usize>,
    /// Labels removed before the support filter; defaults to neutral and gratitude.
    #[serde(default)]
    pub drop: Option<Vec<String>>,
    /// Partition to cluster for the polarity task.
    #[serde(default)]
    pub polarity: Option<Polarity>,
    /// Cluster each surviving label (or the polarity partition) in this model.
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub min_sim: Option<f64>,
    #[serde(default)]
    pub min_count: Option<usize>,
}

impl SentimentRequest {
    pub fn new(task: Task) -> Self {
        Self {
            keywords: None,
            task,
            min_support: None,
            drop: None,
            polarity: None,
            model: None,
            min_sim: None,
            min_count: None,
        }
    }

    pub fn min_support(&self) -> usize {
        self.min_support.unwrap_or(DEFAULT_MIN_SUPPORT)
    }

    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            min_similarity: self.min_sim.unwrap_or(DEFAULT_POLARITY_PARAMS.min_similarity),
            min_cluster_count: self.min_count.unwrap_or(DEFAULT_POLARITY_PARAMS.min_cluster_count),
            linkage: DEFAULT_POLARITY_PARAMS.linkage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentResponse {
    pub task: Task,
    /// Emotion counts after filtering, or raw polarity counts.
    pub histogram: EmotionHistogram,
    pub sids: BTreeMap<String, Vec<u64>>,
    /// Clusters keyed by emotion label or by the clustered polarity.
    #[serde(default)]
    pub clusters: BTreeMap<String, Vec<Cluster>>,
}

/// Either explicit sids or a search whose thresholded hits are summarized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarizeRequest {
    pub template: String,
    #[serde(default)]
    pub sids: Option<Vec<u64>>,
    #[serde(default)]
    pub search: Option<SearchQuery>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub sentences: usize,
    pub documents: usize,
    pub models: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_defaults() {
        let r = SearchQuery::new("dams").resolve(&SearchDefaults::default()).unwrap();
        assert_eq!(r.request.k, 100);
        assert_eq!(r.min_score, 0.7);
        assert_eq!(r.max_n, 5000);
        assert!(r.request.models.is_empty());
        assert!(r.request.keywords.is_none());
    }

    #[test]
    fn query_lists() {
        let q = SearchQuery {
            models: Some("PSTM_1, PSTM_2,".into()),
            keywords: Some("dam,reservoir+water".into()),
            ..SearchQuery::new("x")
        };
        let r = q.resolve(&SearchDefaults::default()).unwrap();
        assert_eq!(r.request.models, vec!["PSTM_1", "PSTM_2"]);
        assert_eq!(r.request.keywords.unwrap().groups().len(), 2);
    }

    #[test]
    fn cluster_response_shapes_round_trip() {
        let flat = ClusterResponse::Flat(FlatClusters {
            model: "M".into(),
            total_points: 0,
            pre_filter_count: 0,
            clusters: vec![],
        });
        let yearly = ClusterResponse::Yearly(TrendSeries {
            model: "M".into(),
            entries: vec![],
        });
        for r in [flat, yearly] {
            let back: ClusterResponse = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
            assert_eq!(back, r);
        }
    }
}
