use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SearchError;

/// Arithmetic mean, summed left to right.
pub fn mean(scores: &[f64]) -> Result<f64, SearchError> {
    if scores.is_empty() {
        return Err(SearchError::EmptyScores);
    }
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

/// Population variance (divides by n), two-pass with the rounding
/// correction for the mean.
pub fn score_variance(scores: &[f64]) -> Result<f64, SearchError> {
    let m = mean(scores)?;
    let n = scores.len() as f64;
    let (sq, lin) = scores
        .iter()
        .fold((0.0, 0.0), |(sq, lin), s| (sq + (s - m) * (s - m), lin + (s - m)));
    Ok(((sq - lin * lin / n) / n).max(0.0))
}

/// Per-model scores over a shared sentence set: `scores[m][j]` is model
/// `models[m]`'s score for sentence `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreMatrix {
    pub models: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

/// Each model's share (percent) of the total L2 deviation from the
/// per-sentence mean score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    pub shares: BTreeMap<String, f64>,
}

/// `d_m = || s_m - mean ||_2` over sentences; `share_m = 100 (d_m / sum d)`.
/// When no model deviates at all the shares are uniform.
pub fn model_influence(matrix: &ScoreMatrix) -> Result<InfluenceReport, SearchError> {
    let n_models = matrix.models.len();
    let n_sent = matrix.scores.first().map_or(0, Vec::len);
    if n_models < 2
        || matrix.scores.len() != n_models
        || n_sent == 0
        || matrix.scores.iter().any(|r| r.len() != n_sent)
    {
        return Err(SearchError::DegenerateMatrix);
    }

    let mut sq = vec![0.0f64; n_models];
    for j in 0..n_sent {
        for (m, acc) in sq.iter_mut().enumerate() {
            // Mean of pairwise differences: exactly antisymmetric for two models.
            let s_m = matrix.scores[m][j];
            let dev = matrix
                .scores
                .iter()
                .map(|row| s_m - row[j])
                .sum::<f64>()
                / n_models as f64;
            *acc += dev * dev;
        }
    }
    let dist: Vec<f64> = sq.iter().map(|v| v.sqrt()).collect();
    let total: f64 = dist.iter().sum();
    let shares = matrix
        .models
        .iter()
        .zip(&dist)
        .map(|(name, d)| {
            let share = if total == 0.0 {
                100.0 / n_models as f64
            } else {
                100.0 * (d / total)
            };
            (name.clone(), share)
        })
        .collect();
    Ok(InfluenceReport { shares })
}
