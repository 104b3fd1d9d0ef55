mod support;

use std::collections::BTreeSet;

use litmini_core::cluster::{agglomerate_store, representatives, yearly_trends, ClusterParams};
use litmini_core::index::{build_store, get_context, SidSet, VectorStore};
use litmini_core::ingest::{build_corpus, read_corpus, write_corpus, BuildOptions, SentenceKind};
use litmini_core::search::{caption_search, ensemble_search, threshold_select, SearchRequest, StoreSet};
use litmini_core::sentiment::{emotion_pipeline, label_emotions, polarity_partition_and_cluster, LexiconClassifier, Polarity};
use litmini_core::summarize::{label_clusters, summarize_selection, EchoLlm, PromptTemplate};
use litmini_core::{KeywordQuery, Registry};

const DAMS: &str = "Reservoir storage declines during long droughts across the western river basins. \
Unfortunately the reservoir storage declines during long droughts across the western river basins. \
Groundwater recharge improves when managed aquifer recharge basins receive winter flood water. \
We thank the regional water district for sharing the reservoir operations data with us.\n\n\
Figure 1. Reservoir storage over time.";

const RAIN: &str = "Extreme precipitation events are becoming more frequent in many mid latitude regions. \
Extreme precipitation events are becoming more frequent in many mid latitude coastal regions. \
Short sentence here.\n\nReferences\nSmith J. Rainfall statistics and extremes in a warming climate. 2001.";

fn build(dir: &std::path::Path) -> litmini_core::Corpus {
    support::write_docs(dir, &[("WR-2019-Storage.txt", DAMS), ("HESS-2021-Rain.txt", RAIN)]);
    let out = build_corpus(dir, &BuildOptions::default()).unwrap();
    assert!(out.issues.is_empty(), "{:?}", out.issues);
    let store_dir = dir.join("corpus");
    write_corpus(&store_dir, &out).unwrap();
    read_corpus(&store_dir).unwrap()
}

#[test]
fn ingest_to_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = build(tmp.path());

    let body = corpus.sids_of_kind(SentenceKind::Body);
    assert_eq!(body.len(), 6);
    assert!(corpus.records().iter().all(|r| !r.text.contains("Short sentence")));
    assert!(corpus.records().iter().all(|r| !r.text.contains("Smith")));
    assert_eq!(corpus.sids_of_kind(SentenceKind::Caption).len(), 1);

    let registry = Registry::reference();
    let all = SidSet::new(body.clone());
    let stores: StoreSet = ["PSTM_1", "PSTM_2"]
        .iter()
        .map(|m| build_store(&corpus, &all, &registry, m, true).unwrap())
        .collect();

    let mut req = SearchRequest::new("reservoir storage declines during long droughts across western river basins", 3);
    req.keywords = Some(KeywordQuery::parse("reservoir", Default::default()).unwrap());
    let out = ensemble_search(&corpus, &registry, &stores, &req).unwrap();
    assert_eq!(out.candidate_count, 3);
    assert_eq!(out.hits.len(), 3);
    assert!(out.hits[0].ensemble_score > out.hits[2].ensemble_score);
    assert!(out.influence.is_some());

    let ctx = get_context(&corpus, out.hits[0].sid, 1, 1).unwrap();
    assert_eq!(ctx.center.sid, out.hits[0].sid);

    let selected = threshold_select(&out.hits, 0.7, 5000);
    assert!(!selected.is_empty());
    let sids: Vec<u64> = selected.iter().map(|h| h.sid).collect();
    let summary = summarize_selection(&EchoLlm, &PromptTemplate::builtin("summary400").unwrap(), &corpus, &sids).unwrap();
    for sid in &sids {
        assert!(summary.summary.contains(&corpus.record(*sid).unwrap().text));
    }
    assert_eq!(summary.provenance.sids, sids);
    assert_eq!(summary.provenance.provider, "echo");

    let captions_set = SidSet::new(corpus.sids_of_kind(SentenceKind::Caption));
    let caption_store = build_store(&corpus, &captions_set, &registry, "PSTM_1", true).unwrap();
    let hits = caption_search(&corpus, &registry, Some(&caption_store), "reservoir storage", 5).unwrap();
    assert_eq!(hits.len(), 1);
}

#[test]
fn clustering_sentiment_and_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = build(tmp.path());
    let registry = Registry::reference();
    let store: VectorStore = build_store(
        &corpus,
        &SidSet::new(corpus.sids_of_kind(SentenceKind::Body)),
        &registry,
        "PSTM_1",
        true,
    )
    .unwrap();

    let outcome = agglomerate_store(&store, None, &ClusterParams::new(0.7, 2)).unwrap();
    assert_eq!(outcome.clusters.len(), 2);
    for c in &outcome.clusters {
        assert_eq!(c.size, 2);
        let reps = representatives(c, &store, &corpus, 25).unwrap();
        assert_eq!(reps.len(), 2);
    }

    let labels = label_clusters(&EchoLlm, &outcome.clusters, &store, &corpus, 1, 2).unwrap();
    assert_eq!(labels.keys().copied().collect::<Vec<_>>(), vec![1, 2]);
    for (id, label) in &labels {
        let cluster = &outcome.clusters[id - 1];
        assert_eq!(label.provenance.sids.len(), 1);
        assert!(cluster.member_sids.contains(&label.provenance.sids[0]));
    }

    let trends = yearly_trends(&corpus, &store, None, &ClusterParams::new(0.7, 2), 10).unwrap();
    let years: Vec<i32> = trends.entries.iter().map(|e| e.year).collect();
    assert_eq!(years, vec![2019, 2020, 2021]);
    assert_eq!(trends.entries[1].total_points, 0);
    assert_eq!(trends.entries[0].clusters.len(), 1);

    let labeled = label_emotions(&corpus, &LexiconClassifier, None).unwrap();
    let summary = emotion_pipeline(&labeled, 0, &BTreeSet::new());
    assert_eq!(summary.histogram.counts["disappointment"], 1);
    assert_eq!(summary.histogram.counts["gratitude"], 1);
    assert_eq!(summary.histogram.total, 6);

    let negative = polarity_partition_and_cluster(
        &corpus,
        &LexiconClassifier,
        None,
        Polarity::Negative,
        &store,
        &ClusterParams::new(0.85, 2),
    )
    .unwrap();
    assert_eq!(negative.clusters.len(), 1);
    for sid in &negative.clusters[0].member_sids {
        assert!(corpus.record(*sid).unwrap().text.contains("declines"));
    }
}
