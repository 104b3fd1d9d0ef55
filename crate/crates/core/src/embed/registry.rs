use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EmbedError, HashEmbedder, HttpEmbedder, ModelSpec, Vector};
use crate::provider::ProviderError;

/// Anything that can embed a batch of texts for a model.
///
/// Implementations must tolerate concurrent calls.
pub trait EmbedProvider: Send + Sync {
    fn id(&self) -> String;
    fn embed(&self, model: &ModelSpec, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError>;
}

#[derive(Clone)]
pub struct ModelEntry {
    pub spec: ModelSpec,
    pub provider: Arc<dyn EmbedProvider>,
}

impl std::fmt::Debug for ModelEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelEntry")
            .field("spec", &self.spec)
            .field("provider", &self.provider.id())
            .finish()
    }
}

/// How a configured model reaches its provider.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProviderRef {
    Hash { seed: u64 },
    Http { url: String },
}

impl std::str::FromStr for ProviderRef {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(seed) = s.strip_prefix("builtin:hash:") {
            let seed = seed
                .parse()
                .map_err(|_| EmbedError::Config(format!("bad hash seed in {s:?}")))?;
            return Ok(Self::Hash { seed });
        }
        if s.starts_with("http://") || s.starts_with("https://") {
            return Ok(Self::Http { url: s.to_string() });
        }
        Err(EmbedError::Config(format!(
            "provider must be an http(s) URL or builtin:hash:<seed>, got {s:?}"
        )))
    }
}

impl ProviderRef {
    pub fn connect(&self) -> Arc<dyn EmbedProvider> {
        match self {
            Self::Hash { seed } => Arc::new(HashEmbedder { seed: *seed }),
            Self::Http { url } => Arc::new(HttpEmbedder::new(url.clone())),
        }
    }
}

/// One element of the registry config file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryEntryConfig {
    pub full_name: String,
    pub abbr: String,
    pub max_seq_len: usize,
    pub dim: usize,
    pub size_params: u64,
    #[serde(alias = "provider_url")]
    pub provider: String,
}

/// Models resolvable by abbreviation. Built once, then shared read-only.
#[derive(Debug, Clone, Default)]
pub struct Registry {
    entries: Vec<ModelEntry>,
    by_abbr: HashMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The six reference models, each bound to a hash embedder seeded with
    /// its ordinal (PSTM_1 uses seed 1, and so on).
    pub fn reference() -> Self {
        let mut reg = Self::new();
        for (i, spec) in ModelSpec::reference_models().into_iter().enumerate() {
            reg.register(spec, Arc::new(HashEmbedder { seed: i as u64 + 1 }))
                .expect("reference abbreviations are unique");
        }
        reg
    }

    pub fn register(
        &mut self,
        spec: ModelSpec,
        provider: Arc<dyn EmbedProvider>,
    ) -> Result<&ModelEntry, EmbedError> {
        spec.validate()?;
        if self.by_abbr.contains_key(&spec.abbr) {
            return Err(EmbedError::DuplicateModel(spec.abbr));
        }
        self.by_abbr.insert(spec.abbr.clone(), self.entries.len());
        self.entries.push(ModelEntry { spec, provider });
        Ok(self.entries.last().expect("just pushed"))
    }

    pub fn from_config(entries: &[RegistryEntryConfig]) -> Result<Self, EmbedError> {
        let mut reg = Self::new();
        for e in entries {
            let provider: ProviderRef = e.provider.parse()?;
            let spec = ModelSpec::new(&e.full_name, &e.abbr, e.max_seq_len, e.dim, e.size_params);
            reg.register(spec, provider.connect())?;
        }
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| EmbedError::Config(format!("{}: {e}", path.display())))?;
        let entries: Vec<RegistryEntryConfig> = serde_json::from_str(&raw)
            .map_err(|e| EmbedError::Config(format!("{}: {e}", path.display())))?;
        Self::from_config(&entries)
    }

    pub fn get(&self, abbr: &str) -> Result<&ModelEntry, EmbedError> {
        self.by_abbr
            .get(abbr)
            .map(|&i| &self.entries[i])
            .ok_or_else(|| EmbedError::UnknownModel(abbr.to_string()))
    }

    pub fn contains(&self, abbr: &str) -> bool {
        self.by_abbr.contains_key(abbr)
    }

    pub fn specs(&self) -> impl Iterator<Item = &ModelSpec> {
        self.entries.iter().map(|e| &e.spec)
    }
}

/// Keeps at most `max_tokens` whitespace tokens. Texts already within the
/// limit are returned unchanged.
pub fn truncate_tokens(text: &str, max_tokens: usize) -> std::borrow::Cow<'_, str> {
    let mut tokens = text.split_whitespace();
    if tokens.by_ref().nth(max_tokens).is_none() {
        return std::borrow::Cow::Borrowed(text);
    }
    std::borrow::Cow::Owned(
        text.split_whitespace()
            .take(max_tokens)
            .collect::<Vec<_>>()
            .join(" "),
    )
}

/// Embeds `texts` with the model registered as `abbr`, preserving order.
pub fn embed_batch(registry: &Registry, abbr: &str, texts: &[String]) -> Result<Vec<Vector>, EmbedError> {
    let entry = registry.get(abbr)?;
    if let Some(index) = texts.iter().position(|t| t.trim().is_empty()) {
        return Err(EmbedError::EmptyText { index });
    }
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let inputs: Vec<String> = texts
        .iter()
        .map(|t| truncate_tokens(t, entry.spec.max_seq_len).into_owned())
        .collect();
    let raw = entry.provider.embed(&entry.spec, &inputs)?;
    if raw.len() != texts.len() {
        return Err(EmbedError::CountMismatch {
            expected: texts.len(),
            got: raw.len(),
        });
    }
    raw.into_iter()
        .map(|v| {
            if v.len() != entry.spec.dim {
                return Err(EmbedError::DimensionMismatch {
                    model: entry.spec.abbr.clone(),
                    expected: entry.spec.dim,
                    got: v.len(),
                });
            }
            Vector::new(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct FixedWidth(usize);

    impl EmbedProvider for FixedWidth {
        fn id(&self) -> String {
            "fixed".into()
        }
        fn embed(&self, _: &ModelSpec, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError> {
            Ok(texts.iter().map(|_| vec![0.5; self.0]).collect())
        }
    }

    fn texts(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn reference_registry_lists_all_six() {
        let reg = Registry::reference();
        let abbrs: Vec<&str> = reg.specs().map(|s| s.abbr.as_str()).collect();
        assert_eq!(abbrs, ["PSTM_1", "PSTM_2", "PSTM_3", "PSTM_4", "PSTM_5", "PSTM_6"]);
        assert_eq!(reg.get("PSTM_6").unwrap().spec.dim, 4096);
    }

    #[test]
    fn duplicate_registration() {
        let mut reg = Registry::new();
        let spec = ModelSpec::new("all-MiniLM-L6-v2", "PSTM_1", 256, 384, 22_700_000);
        reg.register(spec.clone(), Arc::new(HashEmbedder { seed: 1 })).unwrap();
        assert_eq!(
            reg.register(spec, Arc::new(HashEmbedder { seed: 2 })).unwrap_err(),
            EmbedError::DuplicateModel("PSTM_1".into())
        );
    }

    #[test]
    fn batch_shape_and_determinism() {
        let reg = Registry::reference();
        let out = embed_batch(&reg, "PSTM_1", &texts(&["rain", "snow", "rain"])).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|v| v.dim() == 384));
        assert_eq!(out[0], out[2]);
    }

    #[test]
    fn batch_errors() {
        let reg = Registry::reference();
        assert_eq!(
            embed_batch(&reg, "PSTM_9", &texts(&["x"])).unwrap_err(),
            EmbedError::UnknownModel("PSTM_9".into())
        );
        assert_eq!(
            embed_batch(&reg, "PSTM_1", &texts(&["x", " "])).unwrap_err(),
            EmbedError::EmptyText { index: 1 }
        );

        let mut reg = Registry::new();
        reg.register(ModelSpec::new("m", "M", 8, 384, 1), Arc::new(FixedWidth(100)))
            .unwrap();
        assert_eq!(
            embed_batch(&reg, "M", &texts(&["x"])).unwrap_err(),
            EmbedError::DimensionMismatch {
                model: "M".into(),
                expected: 384,
                got: 100
            }
        );
    }

    #[test]
    fn long_texts_are_truncated() {
        assert_eq!(truncate_tokens("a b  c", 3), "a b  c");
        assert_eq!(truncate_tokens("a b  c d", 3), "a b c");
        let mut reg = Registry::new();
        reg.register(ModelSpec::new("m", "M", 3, 16, 1), Arc::new(HashEmbedder { seed: 7 }))
            .unwrap();
        let out = embed_batch(&reg, "M", &texts(&["a b c d e", "a b c"])).unwrap();
        assert_eq!(out[0], out[1]);
    }

    #[test]
    fn batches_concatenate() {
        let reg = Registry::reference();
        let xs = texts(&["one two", "three"]);
        let ys = texts(&["four five six"]);
        let mut both = xs.clone();
        both.extend(ys.clone());
        let mut split = embed_batch(&reg, "PSTM_3", &xs).unwrap();
        split.extend(embed_batch(&reg, "PSTM_3", &ys).unwrap());
        assert_eq!(embed_batch(&reg, "PSTM_3", &both).unwrap(), split);
    }

    #[test]
    fn config_parsing() {
        let json = r#"[
            {"full_name": "all-MiniLM-L6-v2", "abbr": "PSTM_1", "max_seq_len": 256, "dim": 384,
             "size_params": 22700000, "provider": "builtin:hash:1"},
            {"full_name": "remote", "abbr": "R", "max_seq_len": 512, "dim": 8,
             "size_params": 1, "provider_url": "http://127.0.0.1:9/embed"}
        ]"#;
        let entries: Vec<RegistryEntryConfig> = serde_json::from_str(json).unwrap();
        let reg = Registry::from_config(&entries).unwrap();
        assert_eq!(reg.get("PSTM_1").unwrap().provider.id(), "builtin:hash:1");
        assert_eq!(reg.get("R").unwrap().provider.id(), "http://127.0.0.1:9/embed");
        assert!("ftp://x".parse::<ProviderRef>().is_err());
        assert!("builtin:hash:x".parse::<ProviderRef>().is_err());
    }
}
