//! Prompt assembly and LLM-backed summaries of sentence selections and clusters.

mod llm;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{representatives, Cluster, ClusterError};
use crate::index::VectorStore;
use crate::ingest::Corpus;
use crate::provider::ProviderError;

pub use llm::{EchoLlm, HttpLlm, Llm};

pub const PLACEHOLDER: &str = "{TEXT}";
pub const DEFAULT_SEPARATOR: &str = "\n";
pub const DEFAULT_REPS_PER_CLUSTER: usize = 25;
pub const DEFAULT_PARALLELISM: usize = 4;

const BUILTIN: [(&str, &str); 3] = [
    ("summary400", "Please summarize provided text with at least 400 words\n\n{TEXT}"),
    ("challenge", "Please summarize the challenge.\n\n{TEXT}"),
    (
        "topic50",
        "Please find the topic within 10 words and summarize the text file within 50 words.\n\n{TEXT}",
    ),
];

#[derive(Debug, Error)]
pub enum SummarizeError {
    #[error("nothing selected to summarize")]
    EmptySelection,
    #[error("unknown template {0:?}")]
    UnknownTemplate(String),
    #[error("template must contain exactly one {PLACEHOLDER}, found {0}")]
    BadTemplate(usize),
    #[error("unknown sid {0}")]
    UnknownSid(u64),
    #[error("invalid parallelism: {0}")]
    Parallelism(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    name: String,
    template: String,
}

impl PromptTemplate {
    pub fn new(name: impl Into<String>, template: impl Into<String>) -> Result<Self, SummarizeError> {
        let template = template.into();
        let n = template.matches(PLACEHOLDER).count();
        if n != 1 {
            return Err(SummarizeError::BadTemplate(n));
        }
        Ok(Self {
            name: name.into(),
            template,
        })
    }

    /// One of the shipped templates: `summary400`, `challenge`, `topic50`.
    pub fn builtin(name: &str) -> Result<Self, SummarizeError> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, t)| Self {
                name: n.to_string(),
                template: t.to_string(),
            })
            .ok_or_else(|| SummarizeError::UnknownTemplate(name.to_string()))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn template(&self) -> &str {
        &self.template
    }
}

/// Substitutes the separator-joined sentences for the placeholder.
pub fn render_prompt<S: AsRef<str>>(t: &PromptTemplate, sentences: &[S], separator: &str) -> Result<String, SummarizeError> {
    if sentences.is_empty() {
        return Err(SummarizeError::EmptySelection);
    }
    let joined = sentences.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(separator);
    Ok(t.template.replacen(PLACEHOLDER, &joined, 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub template: String,
    pub sentence_count: usize,
    pub sids: Vec<u64>,
    pub provider: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub summary: String,
    pub provenance: Provenance,
}

/// Summarizes the sentences `sids` (in the given order, usually rank order).
pub fn summarize_selection(
    llm: &dyn Llm,
    template: &PromptTemplate,
    corpus: &Corpus,
    sids: &[u64],
) -> Result<Summary, SummarizeError> {
    let selection: Vec<(u64, &str)> = sids
        .iter()
        .map(|&sid| {
            corpus
                .record(sid)
                .map(|r| (sid, r.text.as_str()))
                .ok_or(SummarizeError::UnknownSid(sid))
        })
        .collect::<Result<_, _>>()?;
    summarize_texts(llm, template, &selection)
}

/// [`summarize_selection`] over `(sid, text)` pairs already in hand.
pub fn summarize_texts(llm: &dyn Llm, template: &PromptTemplate, selection: &[(u64, &str)]) -> Result<Summary, SummarizeError> {
    let texts: Vec<&str> = selection.iter().map(|s| s.1).collect();
    let prompt = render_prompt(template, &texts, DEFAULT_SEPARATOR)?;
    let summary = llm.complete(&prompt)?;
    Ok(Summary {
        summary,
        provenance: Provenance {
            template: template.name.clone(),
            sentence_count: selection.len(),
            sids: selection.iter().map(|s| s.0).collect(),
            provider: llm.id(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterLabel {
    pub cluster_id: usize,
    pub topic: String,
    pub summary: String,
    pub provenance: Provenance,
}

/// The text after a `Topic:` line, else the first non-empty line.
pub fn parse_topic(text: &str) -> String {
    let lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    for line in lines.clone() {
        if let Some(rest) = line.get(..6).filter(|h| h.eq_ignore_ascii_case("topic:")).map(|_| &line[6..]) {
            return rest.trim().to_string();
        }
    }
    lines.into_iter().next().unwrap_or_default().to_string()
}

/// Topic and short summary for each cluster from its most central members.
///
/// At most `parallelism` provider calls are in flight at once.
pub fn label_clusters(
    llm: &dyn Llm,
    clusters: &[Cluster],
    store: &VectorStore,
    corpus: &Corpus,
    reps_per_cluster: usize,
    parallelism: usize,
) -> Result<BTreeMap<usize, ClusterLabel>, SummarizeError> {
    if clusters.is_empty() {
        return Err(SummarizeError::EmptySelection);
    }
    let template = PromptTemplate::builtin("topic50")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| SummarizeError::Parallelism(e.to_string()))?;
    let labels: Vec<ClusterLabel> = pool.install(|| {
        clusters
            .par_iter()
            .map(|c| {
                let reps = representatives(c, store, corpus, reps_per_cluster)?;
                let sids: Vec<u64> = reps.iter().map(|r| r.sid).collect();
                let out = summarize_selection(llm, &template, corpus, &sids)?;
                Ok(ClusterLabel {
                    cluster_id: c.cluster_id,
                    topic: parse_topic(&out.summary),
                    summary: out.summary,
                    provenance: out.provenance,
                })
            })
            .collect::<Result<_, SummarizeError>>()
    })?;
    Ok(labels.into_iter().map(|l| (l.cluster_id, l)).collect())
}
