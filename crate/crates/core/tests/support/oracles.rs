//! Slow, obviously-correct reference implementations used as test oracles.
//! Nothing here calls into the library's numeric kernels.

#![allow(dead_code)]

use std::cmp::Ordering;

/// Plain left-to-right f64 inner product.
pub fn naive_dot(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        acc += f64::from(*x) * f64::from(*y);
    }
    acc
}

/// Scores every row, sorts by (score desc, sid asc) and truncates.
pub fn full_sort_top_k(sids: &[u64], rows: &[Vec<f32>], q: &[f32], k: usize, restrict: Option<&[u64]>) -> Vec<(u64, f64)> {
    let mut all: Vec<(u64, f64)> = sids
        .iter()
        .zip(rows)
        .filter(|(s, _)| restrict.is_none_or(|r| r.contains(s)))
        .map(|(s, r)| (*s, naive_dot(r, q)))
        .collect();
    all.sort_by(|a, b| match b.1.partial_cmp(&a.1).unwrap() {
        Ordering::Equal => a.0.cmp(&b.0),
        o => o,
    });
    all.truncate(k);
    all
}

pub fn naive_mean(xs: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in xs {
        s += x;
    }
    s / xs.len() as f64
}

pub fn naive_variance(xs: &[f64]) -> f64 {
    let m = naive_mean(xs);
    let mut s = 0.0;
    for x in xs {
        s += (x - m) * (x - m);
    }
    s / xs.len() as f64
}

/// Percent share of each model's L2 distance from the per-sentence mean.
pub fn naive_influence(scores: &[Vec<f64>]) -> Vec<f64> {
    let n_sent = scores[0].len();
    let means: Vec<f64> = (0..n_sent)
        .map(|j| naive_mean(&scores.iter().map(|r| r[j]).collect::<Vec<_>>()))
        .collect();
    let d: Vec<f64> = scores
        .iter()
        .map(|r| r.iter().zip(&means).map(|(s, m)| (s - m) * (s - m)).sum::<f64>().sqrt())
        .collect();
    let total: f64 = d.iter().sum();
    d.iter()
        .map(|x| if total == 0.0 { 100.0 / scores.len() as f64 } else { 100.0 * x / total })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefLinkage {
    Average,
    Complete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefOutcome {
    /// Member sids per cluster, in cluster-id order.
    pub clusters: Vec<Vec<u64>>,
    /// (left min sid, right min sid) per merge.
    pub merges: Vec<(u64, u64)>,
}

/// O(n^3) agglomeration recomputing every linkage from scratch each step.
pub fn naive_agglomerate(
    points: &[(u64, Vec<f32>)],
    min_sim: f64,
    min_count: usize,
    linkage: RefLinkage,
    tie: f64,
) -> RefOutcome {
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.0);
    let n = pts.len();
    let sim: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| naive_dot(&pts[i].1, &pts[j].1)).collect())
        .collect();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    let link = |a: &[usize], b: &[usize]| -> f64 {
        let vals: Vec<f64> = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| sim[i][j]).collect();
        match linkage {
            RefLinkage::Average => vals.iter().sum::<f64>() / vals.len() as f64,
            RefLinkage::Complete => vals.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    };
    loop {
        if clusters.len() < 2 {
            break;
        }
        let mut pairs = Vec::new();
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                pairs.push((a, b, link(&clusters[a], &clusters[b])));
            }
        }
        let best = pairs.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
        if best < min_sim {
            break;
        }
        let floor = (best - tie).max(min_sim);
        let key = |c: &Vec<usize>| *c.iter().min().unwrap();
        let (a, b, _) = pairs
            .into_iter()
            .filter(|p| p.2 >= floor)
            .min_by_key(|p| {
                let (x, y) = (key(&clusters[p.0]), key(&clusters[p.1]));
                (x.min(y), x.max(y))
            })
            .unwrap();
        let (ka, kb) = (key(&clusters[a]), key(&clusters[b]));
        merges.push((pts[ka.min(kb)].0, pts[ka.max(kb)].0));
        let moved = clusters.remove(b);
        clusters[a].extend(moved);
    }
    let mut kept: Vec<Vec<u64>> = clusters
        .into_iter()
        .filter(|c| c.len() >= min_count)
        .map(|c| {
            let mut s: Vec<u64> = c.iter().map(|&i| pts[i].0).collect();
            s.sort();
            s
        })
        .collect();
    kept.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
    RefOutcome { clusters: kept, merges }
}
