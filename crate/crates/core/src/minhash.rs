//! MinHash signatures and LSH banding for near-duplicate detection.
//!
//! Texts are shingled as lowercase word-token *sets* (unicode alphanumeric
//! runs). Each of the k hash functions is the splitmix64 mix of a stable
//! base hash XORed with a per-function seed, so signatures are reproducible
//! across runs and platforms. The Jaccard estimate is the fraction of
//! agreeing signature coordinates.

use crate::hashing::{fnv1a_64, splitmix64, word_tokens};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::collections::HashMap;
use thiserror::Error;

pub const DEFAULT_K: usize = 256;
pub const DEFAULT_BANDS: usize = 32;
pub const DEFAULT_ROWS: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinHashError {
    #[error("text has no word tokens")]
    EmptyTokenSet,
    #[error("k must be at least 16, got {0}")]
    KTooSmall(usize),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
}

/// Per-function minima over the token set's seeded hashes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub seed: u64,
    pub values: Vec<u64>,
}

impl MinHashSignature {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

/// The token set fed to the hasher, exposed so the exact-Jaccard oracle in
/// tests shares the tokenizer.
pub fn token_set(text: &str) -> BTreeSet<String> {
    word_tokens(text).into_iter().collect()
}

fn function_seed(seed: u64, i: usize) -> u64 {
    splitmix64(seed ^ (i as u64).wrapping_mul(0xa076_1d64_78bd_642f))
}

/// Build a k-coordinate signature of `text` under the hash family `seed`.
pub fn minhash_signature(text: &str, k: usize, seed: u64) -> Result<MinHashSignature, MinHashError> {
    if k < 16 {
        return Err(MinHashError::KTooSmall(k));
    }
    let tokens = token_set(text);
    if tokens.is_empty() {
        return Err(MinHashError::EmptyTokenSet);
    }
    let mut values = vec![u64::MAX; k];
    for token in &tokens {
        let base = fnv1a_64(token.as_bytes());
        for (i, slot) in values.iter_mut().enumerate() {
            let h = splitmix64(base ^ function_seed(seed, i));
            if h < *slot {
                *slot = h;
            }
        }
    }
    Ok(MinHashSignature { seed, values })
}

/// Fraction of coordinates where the minima agree; an unbiased estimate of
/// the Jaccard similarity of the underlying token sets.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64, MinHashError> {
    if a.k() != b.k() {
        return Err(MinHashError::SignatureMismatch(format!(
            "k differs: {} vs {}",
            a.k(),
            b.k()
        )));
    }
    if a.seed != b.seed {
        return Err(MinHashError::SignatureMismatch(format!(
            "hash families differ: seed {} vs {}",
            a.seed, b.seed
        )));
    }
    let agree = a
        .values
        .iter()
        .zip(&b.values)
        .filter(|(x, y)| x == y)
        .count();
    Ok(agree as f64 / a.k() as f64)
}

/// Banded index over signatures: two items become candidates when any band
/// of `rows` consecutive coordinates hashes identically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LshIndex {
    pub bands: usize,
    pub rows: usize,
    pub seed: u64,
    buckets: HashMap<u64, Vec<usize>>,
    signatures: Vec<MinHashSignature>,
}

impl LshIndex {
    /// `bands * rows` must equal the signature length k.
    pub fn new(bands: usize, rows: usize, seed: u64) -> Self {
        assert!(bands > 0 && rows > 0, "bands and rows must be positive");
        Self {
            bands,
            rows,
            seed,
            buckets: HashMap::new(),
            signatures: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn signature(&self, idx: usize) -> &MinHashSignature {
        &self.signatures[idx]
    }

    fn band_key(&self, signature: &MinHashSignature, band: usize) -> u64 {
        let start = band * self.rows;
        let mut h = splitmix64(band as u64 ^ 0x1f0e_9b4c_3a5d_7e21);
        for &value in &signature.values[start..start + self.rows] {
            h = splitmix64(h ^ value);
        }
        h
    }

    /// Indices already in the index that collide with `signature` in at
    /// least one band, ascending.
    pub fn candidates(&self, signature: &MinHashSignature) -> Result<BTreeSet<usize>, MinHashError> {
        if signature.k() != self.bands * self.rows {
            return Err(MinHashError::SignatureMismatch(format!(
                "signature k {} does not match bands*rows {}",
                signature.k(),
                self.bands * self.rows
            )));
        }
        let mut out = BTreeSet::new();
        for band in 0..self.bands {
            if let Some(bucket) = self.buckets.get(&self.band_key(signature, band)) {
                out.extend(bucket.iter().copied());
            }
        }
        Ok(out)
    }

    /// Insert a signature and return its index.
    pub fn insert(&mut self, signature: MinHashSignature) -> Result<usize, MinHashError> {
        if signature.k() != self.bands * self.rows {
            return Err(MinHashError::SignatureMismatch(format!(
                "signature k {} does not match bands*rows {}",
                signature.k(),
                self.bands * self.rows
            )));
        }
        let idx = self.signatures.len();
        for band in 0..self.bands {
            let key = self.band_key(&signature, band);
            self.buckets.entry(key).or_default().push(idx);
        }
        self.signatures.push(signature);
        Ok(idx)
    }
}
