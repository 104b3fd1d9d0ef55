use std::path::PathBuf;
use std::sync::Arc;

use litmini_core::api::SearchDefaults;
use litmini_core::ingest::read_corpus;
use litmini_core::search::StoreSet;
use litmini_core::sentiment::{Classifier, HttpClassifier, LexiconClassifier};
use litmini_core::summarize::{EchoLlm, HttpLlm, Llm};
use litmini_core::{Corpus, Registry, VectorStore};
use tokio::sync::Semaphore;

use crate::config::ServiceConfig;
use crate::ServiceError;

/// Everything a request can read. Immutable once built.
#[derive(Clone)]
pub struct AppState {
    pub corpus: Arc<Corpus>,
    pub registry: Arc<Registry>,
    pub stores: Arc<StoreSet>,
    pub caption_store: Option<Arc<VectorStore>>,
    pub classifier: Arc<dyn Classifier>,
    pub llm: Arc<dyn Llm>,
    pub defaults: SearchDefaults,
    pub servable: bool,
    pub label_parallelism: usize,
    pub(crate) limiter: Arc<Semaphore>,
}

pub fn classifier_from(spec: &str) -> Result<Arc<dyn Classifier>, ServiceError> {
    match spec {
        "builtin:lexicon" => Ok(Arc::new(LexiconClassifier)),
        url if url.starts_with("http://") || url.starts_with("https://") => Ok(Arc::new(HttpClassifier::new(url))),
        other => Err(ServiceError::Config(format!("unknown classifier {other:?}"))),
    }
}

pub fn llm_from(spec: &str) -> Result<Arc<dyn Llm>, ServiceError> {
    match spec {
        "echo" => Ok(Arc::new(EchoLlm)),
        url if url.starts_with("http://") || url.starts_with("https://") => Ok(Arc::new(HttpLlm::new(url))),
        other => Err(ServiceError::Config(format!("unknown summarizer {other:?}"))),
    }
}

fn read_store(model: Option<&str>, path: &PathBuf, registry: &Registry) -> Result<VectorStore, ServiceError> {
    let store = VectorStore::read(path).map_err(|e| ServiceError::Load(e.to_string()))?;
    if let Some(model) = model {
        if store.model_abbr() != model {
            return Err(ServiceError::Config(format!(
                "{} holds model {}, configured as {model}",
                path.display(),
                store.model_abbr()
            )));
        }
    }
    if !registry.contains(store.model_abbr()) {
        return Err(ServiceError::Config(format!(
            "{}: model {} is not in the registry",
            path.display(),
            store.model_abbr()
        )));
    }
    Ok(store)
}

impl AppState {
    /// Reads the corpus and every store named by `config`. Blocking.
    pub fn load(config: &ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let corpus = read_corpus(&config.corpus_dir).map_err(|e| ServiceError::Load(e.to_string()))?;
        let registry = match &config.registry {
            Some(p) => Registry::load(p).map_err(|e| ServiceError::Config(e.to_string()))?,
            None => Registry::reference(),
        };
        let mut stores = StoreSet::new();
        for (model, path) in &config.stores {
            stores.insert(read_store(Some(model), path, &registry)?);
        }
        let caption_store = config
            .caption_store
            .as_ref()
            .map(|p| read_store(None, p, &registry).map(Arc::new))
            .transpose()?;
        Ok(Self::from_parts(
            corpus,
            registry,
            stores,
            caption_store,
            classifier_from(&config.providers.classify)?,
            llm_from(&config.providers.summarize)?,
            config,
        ))
    }

    /// Assembles state from already-loaded parts; `config` supplies the
    /// defaults and limits only.
    pub fn from_parts(
        corpus: Corpus,
        registry: Registry,
        stores: StoreSet,
        caption_store: Option<Arc<VectorStore>>,
        classifier: Arc<dyn Classifier>,
        llm: Arc<dyn Llm>,
        config: &ServiceConfig,
    ) -> Self {
        Self {
            corpus: Arc::new(corpus),
            registry: Arc::new(registry),
            stores: Arc::new(stores),
            caption_store,
            classifier,
            llm,
            defaults: config.search,
            servable: config.servable,
            label_parallelism: config.label_parallelism,
            limiter: Arc::new(Semaphore::new(config.max_in_flight)),
        }
    }
}
