//! Exact inner-product scan.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::store::VectorStore;
use super::IndexError;
use crate::embed::Vector;

/// Rows scored per parallel task.
const SCAN_CHUNK: usize = 16_384;

/// A sorted, duplicate-free set of sentence ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct SidSet(Vec<u64>);

impl SidSet {
    pub fn new(mut sids: Vec<u64>) -> Self {
        sids.sort_unstable();
        sids.dedup();
        Self(sids)
    }

    pub(crate) fn from_sorted_unchecked(sids: Vec<u64>) -> Self {
        debug_assert!(sids.windows(2).all(|w| w[0] < w[1]));
        Self(sids)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, sid: u64) -> bool {
        self.0.binary_search(&sid).is_ok()
    }

    pub fn intersect(&self, other: &SidSet) -> SidSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(self.len().min(other.len()));
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        SidSet(out)
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }
}

impl From<Vec<u64>> for SidSet {
    fn from(v: Vec<u64>) -> Self {
        Self::new(v)
    }
}

impl From<SidSet> for Vec<u64> {
    fn from(s: SidSet) -> Self {
        s.0
    }
}

impl FromIterator<u64> for SidSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Inner product of two f32 slices accumulated in f64.
///
/// Eight independent lanes are summed in a fixed order, so the result is
/// reproducible. Each f32 product is exact in f64. Negative zero is folded
/// into positive zero so ties compare equal.
#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut lanes = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            lanes[l] += f64::from(x[l]) * f64::from(y[l]);
        }
    }
    let mut tail = 0.0f64;
    for (x, y) in ra.iter().zip(rb) {
        tail += f64::from(*x) * f64::from(*y);
    }
    let sum = ((lanes[0] + lanes[4]) + (lanes[1] + lanes[5]))
        + ((lanes[2] + lanes[6]) + (lanes[3] + lanes[7]))
        + tail;
    sum + 0.0
}

#[derive(Debug, Clone, Copy)]
struct Scored {
    score: f64,
    sid: u64,
}

impl Scored {
    /// Ranking order: higher score first, then lower sid.
    fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then(self.sid.cmp(&other.sid))
    }
}

// Heap order puts the worst-ranked candidate on top.
impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_cmp(other)
    }
}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Scored {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scored {}

struct Bounded {
    k: usize,
    heap: BinaryHeap<Scored>,
}

impl Bounded {
    fn new(k: usize) -> Self {
        Self {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    fn offer(&mut self, item: Scored) {
        if self.heap.len() < self.k {
            self.heap.push(item);
        } else if let Some(worst) = self.heap.peek() {
            if item.rank_cmp(worst) == Ordering::Less {
                self.heap.pop();
                self.heap.push(item);
            }
        }
    }

    fn merge(mut self, other: Bounded) -> Bounded {
        for item in other.heap {
            self.offer(item);
        }
        self
    }
}

fn check_query(store: &VectorStore, query: &Vector) -> Result<(), IndexError> {
    if query.dim() != store.dim() {
        return Err(IndexError::DimensionMismatch {
            expected: store.dim(),
            got: query.dim(),
        });
    }
    Ok(())
}

/// Rows of `store` whose sid is in `restrict`, via a merge join.
fn restricted_rows(store: &VectorStore, restrict: &SidSet) -> Vec<usize> {
    let sids = store.sids();
    let mut rows = Vec::with_capacity(restrict.len().min(sids.len()));
    let mut i = 0;
    for &sid in restrict.as_slice() {
        match sids[i..].binary_search(&sid) {
            Ok(off) => {
                rows.push(i + off);
                i += off + 1;
            }
            Err(off) => i += off,
        }
        if i >= sids.len() {
            break;
        }
    }
    rows
}

/// Exact top-k by descending inner product, ties by ascending sid.
///
/// With `restrict`, only rows whose sid is in the set are candidates. The
/// scan is split across threads; because the ranking order is total, the
/// result equals a sequential scan.
pub fn top_k(
    store: &VectorStore,
    query: &Vector,
    k: usize,
    restrict: Option<&SidSet>,
) -> Result<Vec<(u64, f64)>, IndexError> {
    check_query(store, query)?;
    if k == 0 {
        return Err(IndexError::ZeroK);
    }
    let q = query.as_slice();
    let sids = store.sids();
    let score_row = |row: usize| Scored {
        score: dot(store.row(row), q),
        sid: sids[row],
    };

    let best = match restrict {
        None => (0..store.count())
            .into_par_iter()
            .with_min_len(SCAN_CHUNK)
            .fold(|| Bounded::new(k), |mut acc, row| {
                acc.offer(score_row(row));
                acc
            })
            .reduce(|| Bounded::new(k), Bounded::merge),
        Some(set) => restricted_rows(store, set)
            .into_par_iter()
            .with_min_len(SCAN_CHUNK)
            .fold(|| Bounded::new(k), |mut acc, row| {
                acc.offer(score_row(row));
                acc
            })
            .reduce(|| Bounded::new(k), Bounded::merge),
    };

    let mut out = best.heap.into_vec();
    out.sort_by(Scored::rank_cmp);
    Ok(out.into_iter().map(|s| (s.sid, s.score)).collect())
}

/// Scores of the listed sids, aligned with `sids`. Every sid must be present.
pub fn scores_for(store: &VectorStore, query: &Vector, sids: &SidSet) -> Result<Vec<f64>, IndexError> {
    check_query(store, query)?;
    let q = query.as_slice();
    sids.as_slice()
        .par_iter()
        .with_min_len(1024)
        .map(|&sid| {
            store
                .row_of(sid)
                .map(|row| dot(store.row(row), q))
                .ok_or(IndexError::UnknownSid(sid))
        })
        .collect()
}
