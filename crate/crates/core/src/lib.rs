//! Sentence-level literature mining.
//!
//! The pipeline runs in stages that compose through files on disk:
//!
//! 1. [`ingest`] turns extracted document text into a filtered, position
//!    indexed sentence corpus.
//! 2. [`embed`] maps sentences to dense vectors through a model registry.
//! 3. [`index`] persists per-model vector stores and answers exact top-k
//!    inner-product queries, optionally behind a boolean keyword prefilter.
//! 4. [`search`], [`cluster`], [`sentiment`] and [`summarize`] are the
//!    downstream tasks built on top of the corpus and the stores.
//!
//! Neural models (embedders, classifiers, LLMs) are reached through small
//! provider traits; every trait ships a deterministic in-process double so
//! the whole pipeline runs without network access.

pub mod api;
pub mod cluster;
pub mod embed;
pub mod index;
pub mod ingest;
pub mod provider;
pub mod search;
pub mod sentiment;
pub mod summarize;

pub use embed::{ModelSpec, Registry, Vector};
pub use index::{KeywordQuery, VectorStore};
pub use ingest::{Corpus, DocMeta, SentenceKind, SentenceRecord};
pub use provider::ProviderError;
