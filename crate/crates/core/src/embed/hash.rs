//! Signed feature-hashing embedder used as the in-process model double.

use super::registry::EmbedProvider;
use super::{ModelSpec, Vector};
use crate::provider::ProviderError;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn token_hash(token: &str, seed: u64) -> u64 {
    let mut h = FNV_OFFSET ^ mix(seed);
    for b in token.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    mix(h)
}

/// Bag-of-words signed hash embedding, unit-normalized.
///
/// Tokens are lowercase alphanumeric runs. Each token lands in bucket
/// `hash % dim` with sign taken from the hash's top bit. When every bucket
/// cancels to zero (or there are no tokens) the result is `e0`.
pub fn hash_embed(text: &str, dim: usize, seed: u64) -> Vector {
    assert!(dim >= 1, "hash_embed needs dim >= 1");
    let mut acc = vec![0.0f64; dim];
    let lower = text.to_lowercase();
    for token in lower.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()) {
        let h = token_hash(token, seed);
        let bucket = (h % dim as u64) as usize;
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        acc[bucket] += sign;
    }
    let norm = acc.iter().map(|v| v * v).sum::<f64>().sqrt();
    let values = if norm == 0.0 {
        let mut e0 = vec![0.0f32; dim];
        e0[0] = 1.0;
        e0
    } else {
        acc.iter().map(|v| (v / norm) as f32).collect()
    };
    Vector::new(values).expect("hash embedding is finite")
}

/// [`hash_embed`] as an [`EmbedProvider`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedder {
    pub seed: u64,
}

impl EmbedProvider for HashEmbedder {
    fn id(&self) -> String {
        format!("builtin:hash:{}", self.seed)
    }

    fn embed(&self, model: &ModelSpec, texts: &[String]) -> Result<Vec<Vec<f32>>, ProviderError> {
        Ok(texts
            .iter()
            .map(|t| hash_embed(t, model.dim, self.seed).into_inner())
            .collect())
    }
}
