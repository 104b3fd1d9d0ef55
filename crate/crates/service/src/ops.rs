//! Request handling without the HTTP layer. Each function is the blocking
//! body of one endpoint.

use std::collections::{BTreeMap, BTreeSet};

use litmini_core::api::{
    hydrate_hits, parse_keywords, ApiHit, ClusterRequest, ClusterResponse, FlatClusters, Health, SearchQuery,
    SentimentRequest, SentimentResponse, SummarizeRequest,
};
use litmini_core::cluster::{agglomerate_store, top_clusters, yearly_trends, Cluster, ClusterParams};
use litmini_core::index::{get_context, ContextWindow, IndexError, KeywordQuery, SidSet};
use litmini_core::search::{caption_search, ensemble_search, threshold_select, CaptionHit, SearchError, SearchHit};
use litmini_core::sentiment::{classify_polarity, emotion_pipeline, label_emotions, EmotionHistogram, Task, DEFAULT_DROP};
use litmini_core::summarize::{summarize_selection, PromptTemplate, Summary};
use litmini_core::{SentenceKind, VectorStore};

use crate::error::ApiError;
use crate::state::AppState;

/// Per-year clustering keeps this many clusters unless told otherwise.
pub const DEFAULT_TOP_PER_YEAR: usize = 10;

pub fn health(state: &AppState) -> Health {
    Health {
        status: "ok".into(),
        sentences: state.corpus.len(),
        documents: state.corpus.docs().len(),
        models: state.stores.models().map(str::to_string).collect(),
    }
}

/// Ranked hits above the score threshold, up to `max_n`.
pub fn search_hits(state: &AppState, query: &SearchQuery) -> Result<Vec<SearchHit>, ApiError> {
    let resolved = query.resolve(&state.defaults).map_err(ApiError::bad_request)?;
    match ensemble_search(&state.corpus, &state.registry, &state.stores, &resolved.request) {
        Ok(out) => Ok(threshold_select(&out.hits, resolved.min_score, resolved.max_n)),
        Err(SearchError::NoCandidates) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

pub fn search(state: &AppState, query: &SearchQuery) -> Result<Vec<ApiHit>, ApiError> {
    let hits = search_hits(state, query)?;
    Ok(hydrate_hits(&state.corpus, hits, state.defaults.n_before, state.defaults.n_after))
}

pub fn captions(state: &AppState, q: &str, k: usize) -> Result<Vec<CaptionHit>, ApiError> {
    Ok(caption_search(&state.corpus, &state.registry, state.caption_store.as_deref(), q, k)?)
}

pub fn context(state: &AppState, sid: u64, before: Option<usize>, after: Option<usize>) -> Result<ContextWindow, ApiError> {
    get_context(
        &state.corpus,
        sid,
        before.unwrap_or(state.defaults.n_before),
        after.unwrap_or(state.defaults.n_after),
    )
    .map_err(|e| match e {
        IndexError::UnknownSid(_) => ApiError::not_found(e.to_string()),
        other => other.into(),
    })
}

fn store_for<'a>(state: &'a AppState, model: &str) -> Result<&'a VectorStore, ApiError> {
    state.stores.get(model).map(|s| s.as_ref()).ok_or_else(ApiError::unknown_model)
}

fn keywords(expr: Option<&str>) -> Result<Option<KeywordQuery>, ApiError> {
    parse_keywords(expr).map_err(ApiError::bad_request)
}

/// Body sentences matching `kw` that `store` has vectors for.
pub fn candidate_sids(state: &AppState, store: &VectorStore, kw: Option<&KeywordQuery>) -> SidSet {
    state
        .corpus
        .records()
        .iter()
        .filter(|r| r.kind == SentenceKind::Body && kw.is_none_or(|q| q.matches(&r.text)))
        .map(|r| r.sid)
        .filter(|&sid| store.row_of(sid).is_some())
        .collect()
}

fn cluster_sids(store: &VectorStore, sids: &SidSet, params: &ClusterParams) -> Result<Vec<Cluster>, ApiError> {
    if sids.is_empty() {
        params.validate()?;
        return Ok(Vec::new());
    }
    Ok(agglomerate_store(store, Some(sids), params)?.clusters)
}

pub fn cluster(state: &AppState, req: &ClusterRequest) -> Result<ClusterResponse, ApiError> {
    let store = store_for(state, &req.model)?;
    let params = req.params();
    params.validate()?;
    let kw = keywords(req.keywords.as_deref())?;
    if req.per_year {
        let top = req.top_n.unwrap_or(DEFAULT_TOP_PER_YEAR);
        return Ok(ClusterResponse::Yearly(yearly_trends(&state.corpus, store, kw.as_ref(), &params, top)?));
    }
    let sids = candidate_sids(state, store, kw.as_ref());
    let (pre_filter_count, clusters) = if sids.is_empty() {
        (0, Vec::new())
    } else {
        let out = agglomerate_store(store, Some(&sids), &params)?;
        (out.pre_filter_count, out.clusters)
    };
    Ok(ClusterResponse::Flat(FlatClusters {
        model: req.model.clone(),
        total_points: sids.len(),
        pre_filter_count,
        clusters: match req.top_n {
            Some(n) => top_clusters(&clusters, n),
            None => clusters,
        },
    }))
}

pub fn sentiment(state: &AppState, req: &SentimentRequest) -> Result<SentimentResponse, ApiError> {
    let kw = keywords(req.keywords.as_deref())?;
    let store = req.model.as_deref().map(|m| store_for(state, m)).transpose()?;
    let params = req.cluster_params();
    params.validate()?;

    let (histogram, sids) = match req.task {
        Task::Emotion => {
            let labeled = label_emotions(&state.corpus, state.classifier.as_ref(), kw.as_ref())?;
            let drop: BTreeSet<String> = match &req.drop {
                Some(d) => d.iter().cloned().collect(),
                None => DEFAULT_DROP.iter().map(|s| s.to_string()).collect(),
            };
            let summary = emotion_pipeline(&labeled, req.min_support(), &drop);
            (summary.histogram, summary.sids)
        }
        Task::Polarity => {
            let records: Vec<_> = state
                .corpus
                .records()
                .iter()
                .filter(|r| r.kind == SentenceKind::Body && kw.as_ref().is_none_or(|q| q.matches(&r.text)))
                .collect();
            let texts: Vec<String> = records.iter().map(|r| r.text.clone()).collect();
            let labels = classify_polarity(state.classifier.as_ref(), &texts)?;
            let mut sids: BTreeMap<String, Vec<u64>> = BTreeMap::new();
            for (r, l) in records.iter().zip(labels) {
                sids.entry(l.label.as_str().to_string()).or_default().push(r.sid);
            }
            let counts: BTreeMap<String, usize> = sids.iter().map(|(k, v)| (k.clone(), v.len())).collect();
            let total = counts.values().sum();
            (EmotionHistogram { counts, total }, sids)
        }
    };

    let mut clusters = BTreeMap::new();
    if let Some(store) = store {
        let labels: Vec<String> = match req.task {
            Task::Emotion => sids.keys().cloned().collect(),
            Task::Polarity => vec![req.polarity.unwrap_or(litmini_core::sentiment::Polarity::Negative).as_str().to_string()],
        };
        for label in labels {
            let set = SidSet::new(sids.get(&label).cloned().unwrap_or_default());
            clusters.insert(label, cluster_sids(store, &set, &params)?);
        }
    }
    Ok(SentimentResponse {
        task: req.task,
        histogram,
        sids,
        clusters,
    })
}

pub fn summarize(state: &AppState, req: &SummarizeRequest) -> Result<Summary, ApiError> {
    let template = PromptTemplate::builtin(&req.template)?;
    let sids: Vec<u64> = match (&req.sids, &req.search) {
        (Some(sids), None) => sids.clone(),
        (None, Some(query)) => search_hits(state, query)?.into_iter().map(|h| h.sid).collect(),
        _ => return Err(ApiError::bad_request("give exactly one of sids or search")),
    };
    Ok(summarize_selection(state.llm.as_ref(), &template, &state.corpus, &sids)?)
}
