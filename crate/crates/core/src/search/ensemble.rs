use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{mean, model_influence, score_variance, InfluenceReport, ScoreMatrix};
use super::{SearchError, SearchHit};
use crate::embed::{embed_batch, normalize, Registry, Vector};
use crate::index::{scores_for, KeywordQuery, SidSet, VectorStore};
use crate::ingest::{Corpus, SentenceKind, SentenceRecord};

/// Loaded vector stores keyed by model abbreviation.
#[derive(Debug, Clone, Default)]
pub struct StoreSet {
    stores: BTreeMap<String, Arc<VectorStore>>,
}

impl StoreSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a store under its own model name, replacing any previous one.
    pub fn insert(&mut self, store: VectorStore) {
        self.stores.insert(store.model_abbr().to_string(), Arc::new(store));
    }

    pub fn get(&self, abbr: &str) -> Option<&Arc<VectorStore>> {
        self.stores.get(abbr)
    }

    pub fn models(&self) -> impl Iterator<Item = &str> {
        self.stores.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Arc<VectorStore>)> {
        self.stores.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.stores.is_empty()
    }
}

impl FromIterator<VectorStore> for StoreSet {
    fn from_iter<I: IntoIterator<Item = VectorStore>>(iter: I) -> Self {
        let mut set = Self::new();
        for s in iter {
            set.insert(s);
        }
        set
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchFilters {
    #[serde(default)]
    pub journal: Option<String>,
    #[serde(default)]
    pub year_from: Option<i32>,
    #[serde(default)]
    pub year_to: Option<i32>,
}

impl SearchFilters {
    pub fn accepts(&self, r: &SentenceRecord) -> bool {
        self.journal.as_ref().is_none_or(|j| j.eq_ignore_ascii_case(&r.journal))
            && self.year_from.is_none_or(|y| r.year >= y)
            && self.year_to.is_none_or(|y| r.year <= y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchRequest {
    pub query: String,
    /// Models to ensemble; empty means every loaded store.
    pub models: Vec<String>,
    pub k: usize,
    pub keywords: Option<KeywordQuery>,
    pub filters: SearchFilters,
    /// Z-score each model's candidate scores before averaging.
    pub standardize: bool,
}

impl SearchRequest {
    pub fn new(query: impl Into<String>, k: usize) -> Self {
        Self {
            query: query.into(),
            models: Vec::new(),
            k,
            keywords: None,
            filters: SearchFilters::default(),
            standardize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub models: Vec<String>,
    pub candidate_count: usize,
    pub hits: Vec<SearchHit>,
    /// Present when two or more models were ensembled.
    pub influence: Option<InfluenceReport>,
}

/// Embeds a query for `store`'s model, normalizing when the store is.
pub fn embed_query(registry: &Registry, store: &VectorStore, text: &str) -> Result<Vector, SearchError> {
    let mut v = embed_batch(registry, store.model_abbr(), &[text.to_string()])?;
    let v = v.pop().expect("one vector per text");
    Ok(if store.normalized() { normalize(&v)? } else { v })
}

fn standardize(scores: &mut [f64]) {
    let n = scores.len() as f64;
    let m = scores.iter().sum::<f64>() / n;
    let sd = (scores.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / n).sqrt();
    for s in scores.iter_mut() {
        *s = if sd > 0.0 { (*s - m) / sd } else { 0.0 };
    }
}

/// Scores every candidate under every requested model and ranks by the
/// arithmetic mean across models.
///
/// Candidates are body sentences passing the keyword query and metadata
/// filters that are present in every selected store, so each ensemble mean
/// covers the same models.
pub fn ensemble_search(
    corpus: &Corpus,
    registry: &Registry,
    stores: &StoreSet,
    req: &SearchRequest,
) -> Result<SearchOutcome, SearchError> {
    if req.k == 0 {
        return Err(SearchError::ZeroK);
    }
    if req.query.trim().is_empty() {
        return Err(SearchError::EmptyQuery);
    }
    let mut models: Vec<String> = if req.models.is_empty() {
        stores.models().map(str::to_string).collect()
    } else {
        req.models.clone()
    };
    models.sort();
    models.dedup();
    if models.is_empty() {
        return Err(SearchError::NoModels);
    }
    let selected: Vec<&Arc<VectorStore>> = models
        .iter()
        .map(|m| {
            if !registry.contains(m) {
                return Err(SearchError::UnknownModel(m.clone()));
            }
            stores.get(m).ok_or_else(|| SearchError::UnknownModel(m.clone()))
        })
        .collect::<Result<_, _>>()?;

    if !corpus.records().iter().any(|r| r.kind == SentenceKind::Body) {
        return Err(SearchError::EmptyCorpus);
    }
    let mut candidates: SidSet = corpus
        .records()
        .par_iter()
        .filter(|r| {
            r.kind == SentenceKind::Body
                && req.filters.accepts(r)
                && req.keywords.as_ref().is_none_or(|q| q.matches(&r.text))
        })
        .map(|r| r.sid)
        .collect::<Vec<_>>()
        .into();
    for store in &selected {
        candidates = candidates.intersect(&store.sid_set());
    }
    if candidates.is_empty() {
        return Err(SearchError::NoCandidates);
    }

    let mut per_model: Vec<Vec<f64>> = selected
        .par_iter()
        .map(|store| {
            let q = embed_query(registry, store, &req.query)?;
            Ok(scores_for(store, &q, &candidates)?)
        })
        .collect::<Result<_, SearchError>>()?;
    if req.standardize {
        per_model.iter_mut().for_each(|s| standardize(s));
    }

    let sids = candidates.as_slice();
    let summary: Vec<(f64, f64)> = (0..sids.len())
        .into_par_iter()
        .map_init(Vec::new, |column, j| {
            column.clear();
            column.extend(per_model.iter().map(|s| s[j]));
            (mean(column).expect("models"), score_variance(column).expect("models"))
        })
        .collect();

    let mut order: Vec<usize> = (0..sids.len()).collect();
    order.sort_by(|&a, &b| summary[b].0.total_cmp(&summary[a].0).then(sids[a].cmp(&sids[b])));
    let hits = order
        .into_iter()
        .take(req.k)
        .enumerate()
        .map(|(i, j)| SearchHit {
            sid: sids[j],
            per_model_scores: models
                .iter()
                .zip(&per_model)
                .map(|(m, s)| (m.clone(), s[j]))
                .collect(),
            ensemble_score: summary[j].0,
            variance: summary[j].1,
            rank: i + 1,
        })
        .collect();

    let influence = if models.len() >= 2 {
        Some(model_influence(&ScoreMatrix {
            models: models.clone(),
            scores: per_model,
        })?)
    } else {
        None
    };

    Ok(SearchOutcome {
        models,
        candidate_count: sids.len(),
        hits,
        influence,
    })
}
