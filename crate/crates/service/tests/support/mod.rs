#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use litmini_core::index::{build_store, SidSet};
use litmini_core::ingest::{build_corpus, read_corpus, write_corpus, BuildOptions};
use litmini_core::search::StoreSet;
use litmini_core::sentiment::Classifier;
use litmini_core::summarize::Llm;
use litmini_core::{Registry, SentenceKind, VectorStore};
use litmini_service::{AppState, ServiceConfig};

pub fn fixture_docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/synthetic")
}

/// Corpus and PSTM_1/PSTM_2 stores of the synthetic fixture written under `dir`.
pub fn write_fixture(dir: &Path) -> ServiceConfig {
    let built = build_corpus(&fixture_docs(), &BuildOptions::default()).unwrap();
    let corpus_dir = dir.join("corpus");
    write_corpus(&corpus_dir, &built).unwrap();
    let corpus = read_corpus(&corpus_dir).unwrap();
    let registry = Registry::reference();
    let body = SidSet::new(corpus.sids_of_kind(SentenceKind::Body));
    let mut config = ServiceConfig::new(&corpus_dir);
    for model in ["PSTM_1", "PSTM_2"] {
        let path = dir.join(format!("{model}.mlmv"));
        build_store(&corpus, &body, &registry, model, true).unwrap().write(&path).unwrap();
        config.stores.insert(model.into(), path);
    }
    let captions = SidSet::new(corpus.sids_of_kind(SentenceKind::Caption));
    let path = dir.join("captions.mlmv");
    build_store(&corpus, &captions, &registry, "PSTM_1", true).unwrap().write(&path).unwrap();
    config.caption_store = Some(path);
    config
}

/// State over the fixture with the given providers and no caption store.
pub fn state_with(config: &ServiceConfig, classifier: Arc<dyn Classifier>, llm: Arc<dyn Llm>) -> AppState {
    let corpus = read_corpus(&config.corpus_dir).unwrap();
    let mut stores = StoreSet::new();
    for path in config.stores.values() {
        stores.insert(VectorStore::read(path).unwrap());
    }
    AppState::from_parts(corpus, Registry::reference(), stores, None, classifier, llm, config)
}
