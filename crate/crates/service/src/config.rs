use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use litmini_core::api::SearchDefaults;
use serde::{Deserialize, Serialize};

use crate::ServiceError;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

fn default_listen() -> String {
    DEFAULT_LISTEN.to_string()
}

fn default_max_in_flight() -> usize {
    8
}

fn default_parallelism() -> usize {
    litmini_core::summarize::DEFAULT_PARALLELISM
}

fn default_classifier() -> String {
    "builtin:lexicon".to_string()
}

fn default_llm() -> String {
    "echo".to_string()
}

/// Where the classifier and LLM live. `builtin:lexicon` and `echo` select
/// the in-process doubles; anything else is an endpoint URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderConfig {
    #[serde(default = "default_classifier")]
    pub classify: String,
    #[serde(default = "default_llm")]
    pub summarize: String,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            classify: default_classifier(),
            summarize: default_llm(),
        }
    }
}

/// JSON service configuration. Relative paths resolve against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    pub corpus_dir: PathBuf,
    /// Vector store file per model abbreviation.
    pub stores: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub caption_store: Option<PathBuf>,
    /// Model registry file; the reference registry when absent.
    #[serde(default)]
    pub registry: Option<PathBuf>,
    #[serde(default)]
    pub providers: ProviderConfig,
    #[serde(default = "default_listen")]
    pub listen: String,
    #[serde(default)]
    pub search: SearchDefaults,
    /// Allow `/open/{doc_id}?raw=true` to stream source files.
    #[serde(default)]
    pub servable: bool,
    /// Concurrent compute-bound requests; the rest wait.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    /// Concurrent LLM calls while labelling clusters.
    #[serde(default = "default_parallelism")]
    pub label_parallelism: usize,
}

impl ServiceConfig {
    pub fn new(corpus_dir: impl Into<PathBuf>) -> Self {
        Self {
            corpus_dir: corpus_dir.into(),
            stores: BTreeMap::new(),
            caption_store: None,
            registry: None,
            providers: ProviderConfig::default(),
            listen: default_listen(),
            search: SearchDefaults::default(),
            servable: false,
            max_in_flight: default_max_in_flight(),
            label_parallelism: default_parallelism(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let raw = fs::read_to_string(path).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: Self =
            serde_json::from_str(&raw).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus_dir);
        self.stores.values_mut().for_each(fix);
        if let Some(p) = self.caption_store.as_mut() {
            fix(p);
        }
        if let Some(p) = self.registry.as_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        let missing = |p: &Path| ServiceError::Config(format!("{} does not exist", p.display()));
        if !self.corpus_dir.is_dir() {
            return Err(missing(&self.corpus_dir));
        }
        for p in self.stores.values().chain(&self.caption_store).chain(&self.registry) {
            if !p.is_file() {
                return Err(missing(p));
            }
        }
        let s = &self.search;
        if s.k == 0 || s.max_n == 0 || !(-1.0..=1.0).contains(&s.min_score) {
            return Err(ServiceError::Config(format!("search defaults out of range: {s:?}")));
        }
        if self.max_in_flight == 0 || self.label_parallelism == 0 {
            return Err(ServiceError::Config("max_in_flight and label_parallelism must be positive".into()));
        }
        Ok(())
    }
}
