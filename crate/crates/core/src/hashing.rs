//! Stable 64-bit hashing primitives.
//!
//! Everything seeded in this crate (MinHash families, the mock backend, the
//! hashed bag-of-words embedder) must produce identical values across runs,
//! platforms and Rust versions, so we avoid `std::hash` (unspecified
//! algorithm) and use FNV-1a plus the splitmix64 finalizer.

/// FNV-1a over raw bytes.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// splitmix64 finalizer; good avalanche, cheap.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine a text with a seed into one well-mixed key.
pub fn text_key(text: &str, seed: u64) -> u64 {
    splitmix64(fnv1a_64(text.as_bytes()) ^ seed)
}

/// Lowercased word tokens: maximal runs of unicode alphanumeric characters.
/// Shared by the MinHash shingler and the hashed bag-of-words embedder so
/// both sides agree on what a "word" is.
pub fn word_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
