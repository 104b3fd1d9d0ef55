use std::fmt::Write as _;

use super::{Cluster, ClusterError};
use crate::index::VectorStore;

const ITERATIONS: usize = 200;

fn power_iteration(rows: &[Vec<f64>], dim: usize, deflate: Option<&[f64]>) -> Vec<f64> {
    // Fixed, slightly uneven start so results are reproducible.
    let mut v: Vec<f64> = (0..dim).map(|i| 1.0 + (i as f64) * 1e-3).collect();
    let trace: f64 = rows.iter().flatten().map(|x| x * x).sum();
    if let Some(u) = deflate {
        let p: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
    }
    let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n0 > 0.0 {
        v.iter_mut().for_each(|x| *x /= n0);
    }
    for _ in 0..ITERATIONS {
        let mut next = vec![0.0; dim];
        for r in rows {
            let p: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            next.iter_mut().zip(r).for_each(|(n, x)| *n += p * x);
        }
        if let Some(u) = deflate {
            let p: f64 = next.iter().zip(u).map(|(a, b)| a * b).sum();
            next.iter_mut().zip(u).for_each(|(a, b)| *a -= p * b);
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        // No variance left in this direction; keep the orthogonal start.
        if norm <= 1e-12 * trace {
            break;
        }
        v = next.into_iter().map(|x| x / norm).collect();
    }
    v
}

/// Projects vectors onto their first two principal components.
pub fn project_2d(vectors: &[&[f32]]) -> Result<Vec<(f64, f64)>, ClusterError> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let dim = first.len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(ClusterError::DimensionMismatch);
    }
    let n = vectors.len() as f64;
    let mut mean = vec![0.0; dim];
    for v in vectors {
        mean.iter_mut().zip(v.iter()).for_each(|(m, &x)| *m += f64::from(x) / n);
    }
    let rows: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(&x, m)| f64::from(x) - m).collect())
        .collect();
    let pc1 = power_iteration(&rows, dim, None);
    let pc2 = power_iteration(&rows, dim, Some(&pc1));
    let project = |r: &[f64], pc: &[f64]| r.iter().zip(pc).map(|(a, b)| a * b).sum::<f64>();
    Ok(rows.iter().map(|r| (project(r, &pc1), project(r, &pc2))).collect())
}

/// `sid	x	y	cluster_id` rows for every clustered sentence, with a header.
pub fn scatter_tsv(clusters: &[Cluster], store: &VectorStore) -> Result<String, ClusterError> {
    let mut labelled = Vec::new();
    for c in clusters {
        for &sid in &c.member_sids {
            let v = store
                .vector_of(sid)
                .ok_or(ClusterError::Index(crate::index::IndexError::UnknownSid(sid)))?;
            labelled.push((sid, c.cluster_id, v));
        }
    }
    labelled.sort_by_key(|l| l.0);
    let vectors: Vec<&[f32]> = labelled.iter().map(|l| l.2).collect();
    let points = project_2d(&vectors)?;
    let mut out = String::from("sid\tx\ty\tcluster_id\n");
    for ((sid, id, _), (x, y)) in labelled.iter().zip(points) {
        writeln!(out, "{sid}\t{x:.6}\t{y:.6}\t{id}").expect("writing to a String");
    }
    Ok(out)
}
