use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Cluster, ClusterError, ClusterParams, Linkage};
use crate::embed::Vector;
use crate::index::{dot, SidSet, VectorStore};

/// Linkage values this close to the best one count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Largest input accepted; the condensed similarity matrix is `n^2 / 2` f64s.
pub const MAX_POINTS: usize = 20_000;

/// One merge, identified by each side's smallest member sid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeStep {
    pub left: u64,
    pub right: u64,
    pub similarity: f64,
    pub merged_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterOutcome {
    /// Clusters of at least `min_cluster_count` members, largest first.
    pub clusters: Vec<Cluster>,
    /// Number of clusters when merging stopped, before the size floor.
    pub pre_filter_count: usize,
    /// Sids that ended in under-size clusters.
    pub dropped: Vec<u64>,
    pub merges: Vec<MergeStep>,
}

/// Condensed strictly-upper-triangular matrix.
struct Triangle {
    n: usize,
    values: Vec<f64>,
}

impl Triangle {
    fn index(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let at = self.index(i, j);
        self.values[at] = v;
    }
}

struct State {
    linkage: Linkage,
    /// Average linkage keeps pairwise-similarity sums; complete keeps minima.
    matrix: Triangle,
    sizes: Vec<usize>,
    active: Vec<usize>,
    row_best: Vec<f64>,
}

impl State {
    fn link(&self, i: usize, j: usize) -> f64 {
        let v = self.matrix.get(i, j);
        match self.linkage {
            Linkage::Average => v / (self.sizes[i] * self.sizes[j]) as f64,
            Linkage::Complete => v,
        }
    }

    fn recompute_row(&mut self, i: usize) {
        self.row_best[i] = self
            .active
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| self.link(i, j))
            .fold(f64::NEG_INFINITY, f64::max);
    }

    /// The tied-best pair with the smallest (first, second) slot order.
    fn pick(&self, floor: f64) -> Option<(usize, usize, f64)> {
        for (pos, &i) in self.active.iter().enumerate() {
            if self.row_best[i] < floor {
                continue;
            }
            for &j in &self.active[pos + 1..] {
                let l = self.link(i, j);
                if l >= floor {
                    return Some((i, j, l));
                }
            }
        }
        None
    }

    /// Folds slot `b` into slot `a` (`a < b`).
    fn merge(&mut self, a: usize, b: usize) {
        let others: Vec<usize> = self.active.iter().copied().filter(|&c| c != a && c != b).collect();
        let mut stale = Vec::new();
        let mut fresh = Vec::with_capacity(others.len());
        for &c in &others {
            let old_ac = self.link(a, c);
            let old_bc = self.link(b, c);
            if self.row_best[c] == old_ac || self.row_best[c] == old_bc {
                stale.push(c);
            }
            let merged = match self.linkage {
                Linkage::Average => self.matrix.get(a, c) + self.matrix.get(b, c),
                Linkage::Complete => self.matrix.get(a, c).min(self.matrix.get(b, c)),
            };
            self.matrix.set(a, c, merged);
            fresh.push(c);
        }
        self.sizes[a] += self.sizes[b];
        self.sizes[b] = 0;
        self.active.retain(|&c| c != b);

        self.recompute_row(a);
        for c in fresh {
            if stale.contains(&c) {
                continue;
            }
            let l = self.link(a, c);
            if l > self.row_best[c] {
                self.row_best[c] = l;
            }
        }
        for c in stale {
            self.recompute_row(c);
        }
    }
}

fn centroid(vectors: &[&[f32]]) -> Vector {
    let dim = vectors[0].len();
    let mut acc = vec![0.0f64; dim];
    for v in vectors {
        for (a, &x) in acc.iter_mut().zip(v.iter()) {
            *a += f64::from(x);
        }
    }
    let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
    let values = if norm == 0.0 {
        let mut e0 = vec![0.0f32; dim];
        e0[0] = 1.0;
        e0
    } else {
        acc.iter().map(|v| (v / norm) as f32).collect()
    };
    Vector::new(values).expect("mean of finite vectors is finite")
}

/// Bottom-up clustering on inner-product similarity.
///
/// Starting from singletons, repeatedly merges the pair with the highest
/// linkage while that value is at least `min_similarity`. Pairs within
/// [`TIE_TOLERANCE`] of the best (and not below the threshold) are tied and
/// the one whose smallest member sids are lexicographically first wins.
/// Clusters smaller than `min_cluster_count` are then dropped; ids go by
/// size descending, then smallest member sid.
///
/// Input order does not matter: points are sorted by sid first.
pub fn agglomerate(points: &[(u64, &[f32])], params: &ClusterParams) -> Result<ClusterOutcome, ClusterError> {
    params.validate()?;
    if points.is_empty() {
        return Err(ClusterError::EmptyInput);
    }
    let n = points.len();
    if n > MAX_POINTS {
        return Err(ClusterError::TooLarge { n, max: MAX_POINTS });
    }
    let mut items: Vec<(u64, &[f32])> = points.to_vec();
    items.sort_by_key(|p| p.0);
    if let Some(w) = items.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(ClusterError::DuplicateSid(w[0].0));
    }
    let dim = items[0].1.len();
    if items.iter().any(|p| p.1.len() != dim) {
        return Err(ClusterError::DimensionMismatch);
    }

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (i + 1..n).map(|j| dot(items[i].1, items[j].1)).collect())
        .collect();
    let matrix = Triangle {
        n,
        values: rows.into_iter().flatten().collect(),
    };
    let mut state = State {
        linkage: params.linkage,
        matrix,
        sizes: vec![1; n],
        active: (0..n).collect(),
        row_best: vec![f64::NEG_INFINITY; n],
    };
    for i in 0..n {
        state.recompute_row(i);
    }

    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while state.active.len() >= 2 {
        let best = state
            .active
            .iter()
            .map(|&i| state.row_best[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if best < params.min_similarity {
            break;
        }
        let floor = (best - TIE_TOLERANCE).max(params.min_similarity);
        let (a, b, similarity) = state.pick(floor).expect("the best pair clears its own floor");
        state.merge(a, b);
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        merges.push(MergeStep {
            left: items[a].0,
            right: items[b].0,
            similarity,
            merged_size: state.sizes[a],
        });
    }

    let pre_filter_count = state.active.len();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for &slot in &state.active {
        let mut group = std::mem::take(&mut members[slot]);
        group.sort_unstable();
        if group.len() >= params.min_cluster_count {
            kept.push(group);
        } else {
            dropped.extend(group.iter().map(|&i| items[i].0));
        }
    }
    dropped.sort_unstable();
    kept.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
    let clusters = kept
        .into_iter()
        .enumerate()
        .map(|(id, group)| {
            let vectors: Vec<&[f32]> = group.iter().map(|&i| items[i].1).collect();
            Cluster {
                cluster_id: id + 1,
                size: group.len(),
                centroid: centroid(&vectors),
                member_sids: group.iter().map(|&i| items[i].0).collect(),
            }
        })
        .collect();

    Ok(ClusterOutcome {
        clusters,
        pre_filter_count,
        dropped,
        merges,
    })
}

/// [`agglomerate`] over the store rows of `sids` (all of them when `None`).
pub fn agglomerate_store(
    store: &VectorStore,
    sids: Option<&SidSet>,
    params: &ClusterParams,
) -> Result<ClusterOutcome, ClusterError> {
    let points: Vec<(u64, &[f32])> = match sids {
        None => store.sids().iter().enumerate().map(|(i, &s)| (s, store.row(i))).collect(),
        Some(set) => set
            .as_slice()
            .iter()
            .map(|&s| {
                store
                    .vector_of(s)
                    .map(|v| (s, v))
                    .ok_or(crate::index::IndexError::UnknownSid(s))
            })
            .collect::<Result<_, _>>()?,
    };
    agglomerate(&points, params)
}
