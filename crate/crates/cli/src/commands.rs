use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::future::Future;
use std::io::Read as _;
use std::path::Path;
use std::sync::Arc;

use litmini_client::Client;
use litmini_core::api::{
    hydrate_hits, parse_keywords, ApiHit, ClusterRequest, ClusterResponse, SearchDefaults, SearchEnvelope,
    SearchQuery, SentimentRequest, SentimentResponse, SummarizeRequest,
};
use litmini_core::cluster::{scatter_tsv, Cluster};
use litmini_core::index::{build_store, SidSet};
use litmini_core::ingest::{build_corpus, read_corpus, write_corpus, BuildOptions, SegmentOptions};
use litmini_core::search::{ensemble_search, score_buckets, threshold_select, SearchError, StoreSet};
use litmini_core::sentiment::{Classifier, LexiconClassifier};
use litmini_core::summarize::{
    label_clusters, summarize_selection, summarize_texts, ClusterLabel, EchoLlm, Llm, PromptTemplate, Summary,
};
use litmini_core::{Corpus, Registry, SentenceKind, VectorStore};
use litmini_service::{classifier_from, llm_from, ops, AppState, ServiceConfig};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::{ClusterArgs, DoublesArgs, IndexArgs, IngestArgs, SearchArgs, SentimentArgs, ServeArgs, SummarizeArgs};

#[derive(Debug, Clone, Copy)]
pub struct Output {
    pub json: bool,
}

impl Output {
    fn emit<T: Serialize>(self, value: &T, human: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            println!("{}", serde_json::to_string_pretty(value)?);
        } else {
            print!("{}", human());
        }
        Ok(())
    }
}

fn block_on<F: Future>(f: F) -> Result<F::Output> {
    let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
    Ok(rt.block_on(f))
}

fn load_registry(path: Option<&Path>) -> Result<Registry> {
    match path {
        Some(p) => Ok(Registry::load(p)?),
        None => Ok(Registry::reference()),
    }
}

fn keyword_sids(corpus: &Corpus, kind: SentenceKind, keywords: Option<&str>) -> Result<SidSet> {
    let kw = parse_keywords(keywords).map_err(CliError::usage)?;
    Ok(corpus
        .records()
        .iter()
        .filter(|r| r.kind == kind && kw.as_ref().is_none_or(|q| q.matches(&r.text)))
        .map(|r| r.sid)
        .collect())
}

fn local_state(
    corpus_dir: &Path,
    corpus: Corpus,
    registry: Registry,
    stores: StoreSet,
    classifier: Arc<dyn Classifier>,
    llm: Arc<dyn Llm>,
) -> AppState {
    AppState::from_parts(
        corpus,
        registry,
        stores,
        None,
        classifier,
        llm,
        &ServiceConfig::new(corpus_dir),
    )
}

fn read_abbreviations(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

pub fn ingest(a: &IngestArgs, out: Output) -> Result<()> {
    if a.min_words == 0 || a.min_words > a.max_words {
        return Err(CliError::usage("need 1 <= --min-words <= --max-words"));
    }
    let mut segment = match &a.abbrev_file {
        Some(p) => SegmentOptions::with_abbreviations(read_abbreviations(p)?),
        None => SegmentOptions::default(),
    };
    segment.min_words = a.min_words;
    segment.max_words = a.max_words;
    let built = build_corpus(&a.input, &BuildOptions { segment })?;
    for issue in &built.issues {
        tracing::warn!(file = %issue.file, "skipped: {}", issue.error);
    }
    write_corpus(&a.out, &built)?;
    tracing::info!(
        sentences = built.corpus.len(),
        documents = built.corpus.docs().len(),
        out = %a.out.display(),
        "corpus written"
    );
    let report = json!({
        "sentences": built.corpus.len(),
        "documents": built.corpus.docs().len(),
        "issues": built.issues,
        "stats": built.stats,
    });
    out.emit(&report, || built.stats.to_tsv())
}

pub fn index(a: &IndexArgs, out: Output) -> Result<()> {
    let corpus = read_corpus(&a.corpus)?;
    let registry = load_registry(a.registry.as_deref())?;
    let kind = if a.captions { SentenceKind::Caption } else { SentenceKind::Body };
    let sids = keyword_sids(&corpus, kind, a.keywords.as_deref())?;
    if sids.is_empty() {
        return Err(CliError::data("no sentences to index"));
    }
    let store = build_store(&corpus, &sids, &registry, &a.model, !a.no_normalize)?;
    store.write(&a.out)?;
    let report = json!({
        "model": store.model_abbr(),
        "dim": store.dim(),
        "count": store.count(),
        "normalized": store.normalized(),
        "path": a.out,
    });
    out.emit(&report, || {
        format!(
            "{}: {} x {} ({}) -> {}\n",
            store.model_abbr(),
            store.count(),
            store.dim(),
            if store.normalized() { "normalized" } else { "raw" },
            a.out.display()
        )
    })
}

fn render_hits(env: &SearchEnvelope) -> String {
    let mut s = String::new();
    for h in &env.hits {
        for r in &h.context.before {
            let _ = writeln!(s, "               | {}", r.text);
        }
        let _ = writeln!(
            s,
            "{:>4}  {:.4}  {}  {}",
            h.hit.rank, h.hit.ensemble_score, h.source.doc_id, h.context.center.text
        );
        for r in &h.context.after {
            let _ = writeln!(s, "               | {}", r.text);
        }
    }
    if env.hits.is_empty() {
        s.push_str("no hits\n");
    }
    for b in &env.buckets {
        let _ = writeln!(s, "[{:.2}, {:.2}): {}", b.lo, b.hi, b.count);
    }
    if let Some(inf) = &env.influence {
        for (model, share) in &inf.shares {
            let _ = writeln!(s, "{model}: {share:.2}%");
        }
    }
    s
}

pub fn search(a: &SearchArgs, out: Output) -> Result<()> {
    let query = SearchQuery {
        q: a.q.clone(),
        k: Some(a.k),
        models: a.models.clone(),
        keywords: a.keywords.clone(),
        journal: a.journal.clone(),
        year_from: a.year_from,
        year_to: a.year_to,
        standardize: Some(a.standardize),
        min_score: Some(a.min_score),
        max_n: Some(a.max_n),
    };
    let (hits, influence) = match &a.server {
        Some(url) => (block_on(Client::new(url).search(&query))??, None),
        None => {
            let corpus_dir = a.corpus.as_deref().expect("clap requires --corpus");
            let corpus = read_corpus(corpus_dir)?;
            let registry = load_registry(a.registry.as_deref())?;
            let mut stores = StoreSet::new();
            for p in &a.stores {
                stores.insert(VectorStore::read(p)?);
            }
            let resolved = query.resolve(&SearchDefaults::default()).map_err(CliError::usage)?;
            match ensemble_search(&corpus, &registry, &stores, &resolved.request) {
                Ok(outcome) => {
                    let selected = threshold_select(&outcome.hits, resolved.min_score, resolved.max_n);
                    (hydrate_hits(&corpus, selected, a.context, a.context), outcome.influence)
                }
                Err(SearchError::NoCandidates) => (Vec::new(), None),
                Err(e) => return Err(e.into()),
            }
        }
    };
    let scores: Vec<f64> = hits.iter().map(|h| h.hit.ensemble_score).collect();
    let buckets = score_buckets(&scores, &a.buckets)?;
    let env = SearchEnvelope {
        query: a.q.clone(),
        hits,
        influence,
        buckets,
    };
    out.emit(&env, || render_hits(&env))
}

#[derive(Serialize)]
struct ClusterReport {
    #[serde(flatten)]
    result: ClusterResponse,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<BTreeMap<usize, ClusterLabel>>,
}

fn sizes(clusters: &[Cluster]) -> String {
    clusters.iter().map(|c| c.size.to_string()).collect::<Vec<_>>().join(", ")
}

fn render_clusters(report: &ClusterReport) -> String {
    let mut s = String::new();
    match &report.result {
        ClusterResponse::Flat(f) => {
            let _ = writeln!(
                s,
                "{}: {} points, {} clusters, {} shown",
                f.model,
                f.total_points,
                f.pre_filter_count,
                f.clusters.len()
            );
            for c in &f.clusters {
                let topic = report
                    .labels
                    .as_ref()
                    .and_then(|l| l.get(&c.cluster_id))
                    .map(|l| format!("  {}", l.topic))
                    .unwrap_or_default();
                let _ = writeln!(s, "{:>4}  {:>6}{topic}", c.cluster_id, c.size);
            }
        }
        ClusterResponse::Yearly(t) => {
            for e in &t.entries {
                let _ = writeln!(s, "{}  {:>6} points  [{}]", e.year, e.total_points, sizes(&e.clusters));
            }
        }
    }
    s
}

pub fn cluster(a: &ClusterArgs, out: Output) -> Result<()> {
    if a.per_year && (a.scatter.is_some() || a.label) {
        return Err(CliError::usage("--scatter and --label apply to flat clustering only"));
    }
    let mut req = ClusterRequest {
        keywords: a.keywords.clone(),
        model: a.model.clone().unwrap_or_default(),
        min_sim: Some(a.min_sim),
        min_count: Some(a.min_count),
        linkage: Some(a.linkage),
        top_n: a.top,
        per_year: a.per_year,
    };
    if let Some(url) = &a.server {
        if a.model.is_none() {
            return Err(CliError::usage("--server needs --model"));
        }
        if a.scatter.is_some() || a.label {
            return Err(CliError::usage("--scatter and --label need a local --store"));
        }
        let result = block_on(Client::new(url).cluster(&req))??;
        let report = ClusterReport { result, labels: None };
        return out.emit(&report, || render_clusters(&report));
    }

    let corpus_dir = a.corpus.as_deref().expect("clap requires --corpus");
    let store_path = a.store.as_deref().expect("clap requires --store");
    let store = VectorStore::read(store_path)?;
    if a.model.as_deref().is_some_and(|m| m != store.model_abbr()) {
        return Err(CliError::usage(format!("store holds model {}", store.model_abbr())));
    }
    req.model = store.model_abbr().to_string();
    let llm = if a.label { llm_from(&a.provider)? } else { Arc::new(EchoLlm) };
    let mut stores = StoreSet::new();
    stores.insert(store);
    let state = local_state(
        corpus_dir,
        read_corpus(corpus_dir)?,
        Registry::reference(),
        stores,
        Arc::new(LexiconClassifier),
        llm,
    );
    let result = ops::cluster(&state, &req)?;
    let store = state.stores.get(&req.model).expect("inserted above");

    let mut labels = None;
    if let ClusterResponse::Flat(flat) = &result {
        if let Some(path) = &a.scatter {
            let tsv = scatter_tsv(&flat.clusters, store).map_err(CliError::data)?;
            std::fs::write(path, tsv).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        }
        if a.label && !flat.clusters.is_empty() {
            labels = Some(label_clusters(
                state.llm.as_ref(),
                &flat.clusters,
                store,
                &state.corpus,
                a.reps,
                state.label_parallelism,
            )?);
        }
    }
    let report = ClusterReport { result, labels };
    out.emit(&report, || render_clusters(&report))
}

fn render_sentiment(r: &SentimentResponse) -> String {
    let mut s = String::new();
    for (label, count) in &r.histogram.counts {
        let _ = writeln!(s, "{label}\t{count}");
    }
    let _ = writeln!(s, "total\t{}", r.histogram.total);
    for (label, clusters) in &r.clusters {
        let _ = writeln!(s, "{label}: {} clusters [{}]", clusters.len(), sizes(clusters));
    }
    s
}

fn sentiment_store(a: &SentimentArgs, model: &str, corpus: &Corpus) -> Result<VectorStore> {
    let store = match &a.store {
        Some(p) => VectorStore::read(p)?,
        None => {
            let registry = load_registry(a.registry.as_deref())?;
            let sids = keyword_sids(corpus, SentenceKind::Body, a.keywords.as_deref())?;
            if sids.is_empty() {
                return Err(CliError::data("no sentences match the keywords"));
            }
            tracing::info!(model, sentences = sids.len(), "embedding sentences for clustering");
            build_store(corpus, &sids, &registry, model, true)?
        }
    };
    if store.model_abbr() != model {
        return Err(CliError::usage(format!("store holds model {}, not {model}", store.model_abbr())));
    }
    Ok(store)
}

pub fn sentiment(a: &SentimentArgs, out: Output) -> Result<()> {
    let req = SentimentRequest {
        keywords: a.keywords.clone(),
        task: a.task,
        min_support: Some(a.min_support),
        drop: Some(a.drop.clone()),
        polarity: Some(a.polarity),
        model: if a.cluster { a.model.clone() } else { None },
        min_sim: Some(a.min_sim),
        min_count: Some(a.min_count),
    };
    let resp = match &a.server {
        Some(url) => block_on(Client::new(url).sentiment(&req))??,
        None => {
            let corpus_dir = a.corpus.as_deref().expect("clap requires --corpus");
            let corpus = read_corpus(corpus_dir)?;
            let mut stores = StoreSet::new();
            if let Some(model) = &req.model {
                stores.insert(sentiment_store(a, model, &corpus)?);
            }
            let classifier = classifier_from(&a.provider)?;
            let state = local_state(corpus_dir, corpus, Registry::reference(), stores, classifier, Arc::new(EchoLlm));
            ops::sentiment(&state, &req)?
        }
    };
    out.emit(&resp, || render_sentiment(&resp))
}

fn read_hits(path: &Path) -> Result<Vec<ApiHit>> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str::<SearchEnvelope>(&text)
        .map(|env| env.hits)
        .or_else(|_| serde_json::from_str::<Vec<ApiHit>>(&text))
        .map_err(|e| CliError::data(format!("{}: not a search result: {e}", path.display())))
}

pub fn summarize(a: &SummarizeArgs, out: Output) -> Result<()> {
    let hits = read_hits(&a.from_search)?;
    let sids: Vec<u64> = hits.iter().map(|h| h.hit.sid).collect();
    let summary: Summary = match (&a.server, &a.corpus) {
        (Some(url), _) => {
            let req = SummarizeRequest {
                template: a.template.clone(),
                sids: Some(sids),
                search: None,
            };
            block_on(Client::new(url).summarize(&req))??
        }
        (None, corpus_dir) => {
            let template = PromptTemplate::builtin(&a.template)?;
            let llm = llm_from(&a.provider)?;
            match corpus_dir {
                Some(dir) => summarize_selection(llm.as_ref(), &template, &read_corpus(dir)?, &sids)?,
                None => {
                    let selection: Vec<(u64, &str)> =
                        hits.iter().map(|h| (h.hit.sid, h.context.center.text.as_str())).collect();
                    summarize_texts(llm.as_ref(), &template, &selection)?
                }
            }
        }
    };
    out.emit(&summary, || format!("{}\n", summary.summary.trim_end()))
}

async fn shutdown_signal() {
    if let Err(e) = tokio::signal::ctrl_c().await {
        tracing::warn!("cannot listen for ctrl-c: {e}");
        std::future::pending::<()>().await;
    }
    tracing::info!("shutting down");
}

fn multi_thread() -> Result<tokio::runtime::Runtime> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

pub fn serve(a: &ServeArgs) -> Result<()> {
    let mut config = ServiceConfig::load(&a.config)?;
    if let Some(listen) = &a.listen {
        config.listen = listen.clone();
    }
    multi_thread()?.block_on(async move {
        let listen = config.listen.clone();
        let state = tokio::task::spawn_blocking(move || AppState::load(&config))
            .await
            .map_err(CliError::data)??;
        let listener = tokio::net::TcpListener::bind(&listen)
            .await
            .map_err(|e| CliError::data(format!("bind {listen}: {e}")))?;
        litmini_service::serve(listener, state, shutdown_signal()).await?;
        Ok(())
    })
}

pub fn doubles(a: &DoublesArgs) -> Result<()> {
    multi_thread()?.block_on(async {
        let listener = tokio::net::TcpListener::bind(&a.listen)
            .await
            .map_err(|e| CliError::data(format!("bind {}: {e}", a.listen)))?;
        litmini_service::doubles::serve(listener, shutdown_signal()).await?;
        Ok(())
    })
}
