mod support;

use litmini_core::cluster::{agglomerate, ClusterParams, Linkage, TIE_TOLERANCE};
use litmini_core::index::{top_k, SidSet, VectorStore};
use litmini_core::search::{mean, model_influence, score_variance, ScoreMatrix};
use litmini_core::Vector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracles::{full_sort_top_k, naive_agglomerate, naive_influence, naive_mean, naive_variance, RefLinkage};

/// Values on a 1/8 grid so scores tie often and every sum is exact.
fn grid_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    (0..dim).map(|_| rng.gen_range(-8i32..=8) as f32 / 8.0).collect()
}

#[test]
fn top_k_matches_full_sort_with_restrictions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let dim = rng.gen_range(1..=16);
        let count = rng.gen_range(0..=200);
        let mut sids: Vec<u64> = (0..count).map(|_| rng.gen_range(0..10_000)).collect();
        sids.sort();
        sids.dedup();
        let rows: Vec<Vec<f32>> = sids.iter().map(|_| grid_vec(&mut rng, dim)).collect();
        let store = VectorStore::from_parts("T", dim, false, sids.clone(), rows.concat()).unwrap();
        let q = grid_vec(&mut rng, dim);
        let k = rng.gen_range(1..=40);
        let restrict: Vec<u64> = sids.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();

        let got = top_k(&store, &Vector::new(q.clone()).unwrap(), k, None).unwrap();
        assert_eq!(got, full_sort_top_k(&sids, &rows, &q, k, None));

        let set = SidSet::new(restrict.clone());
        let got = top_k(&store, &Vector::new(q.clone()).unwrap(), k, Some(&set)).unwrap();
        assert_eq!(got, full_sort_top_k(&sids, &rows, &q, k, Some(&restrict)));
    }
}

#[test]
fn stats_match_naive_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=30);
        let scores: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        for row in &scores {
            assert!((mean(row).unwrap() - naive_mean(row)).abs() <= 1e-12);
            assert!((score_variance(row).unwrap() - naive_variance(row)).abs() <= 1e-12);
        }
        let models: Vec<String> = (0..m).map(|i| format!("M{i}")).collect();
        let report = model_influence(&ScoreMatrix {
            models: models.clone(),
            scores: scores.clone(),
        })
        .unwrap();
        let expected = naive_influence(&scores);
        for (name, e) in models.iter().zip(expected) {
            assert!((report.shares[name] - e).abs() <= 1e-12);
        }
        assert!((report.shares.values().sum::<f64>() - 100.0).abs() <= 1e-9);
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> Vec<(u64, Vec<f32>)> {
    let n = rng.gen_range(1..=24);
    let dim = rng.gen_range(2..=5);
    let mut sids: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1000)).collect();
    sids.sort();
    sids.dedup();
    sids.into_iter().map(|s| (s, grid_vec(rng, dim))).collect()
}

#[test]
fn agglomerate_matches_naive_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let points = random_instance(&mut rng);
        let min_sim = rng.gen_range(-4i32..=8) as f64 / 8.0;
        let min_count = rng.gen_range(1..=3);
        for (linkage, reference) in [(Linkage::Average, RefLinkage::Average), (Linkage::Complete, RefLinkage::Complete)] {
            let params = ClusterParams::new(min_sim, min_count).with_linkage(linkage);
            let refs: Vec<(u64, &[f32])> = points.iter().map(|(s, v)| (*s, v.as_slice())).collect();
            let got = agglomerate(&refs, &params).unwrap();
            let want = naive_agglomerate(&points, min_sim, min_count, reference, TIE_TOLERANCE);
            let got_clusters: Vec<Vec<u64>> = got.clusters.iter().map(|c| c.member_sids.clone()).collect();
            assert_eq!(got_clusters, want.clusters, "{linkage:?} min_sim {min_sim}");
            let got_merges: Vec<(u64, u64)> = got.merges.iter().map(|m| (m.left, m.right)).collect();
            assert_eq!(got_merges, want.merges);
            assert!(got.merges.iter().all(|m| m.similarity >= min_sim));
        }
    }
}
