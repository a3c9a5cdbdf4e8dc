//! Shared fixtures for the criterion benches.

use footprints_core::event_memory::{Frequency, SeedEvent};
use footprints_core::gateway::mock::MockProvider;
use footprints_core::gateway::{EmbeddingVector, Gateway};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub fn mock_gateway(seed: u64) -> Gateway {
    Gateway::new(Arc::new(MockProvider::new(seed)))
}

/// Seed events with partially-overlapping vocabularies so the deduper has
/// real work to do.
pub fn seed_events(n: usize, seed: u64) -> Vec<SeedEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let words: Vec<String> = (0..rng.gen_range(10..30))
                .map(|_| format!("w{}", rng.gen_range(0..400)))
                .collect();
            SeedEvent {
                event: format!("event {i}"),
                detailed_description: words.join(" "),
                frequency: Frequency::Weekly,
            }
        })
        .collect()
}

pub fn random_embeddings(n: usize, dim: usize, seed: u64) -> Vec<EmbeddingVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| EmbeddingVector {
            values: (0..dim).map(|_| rng.gen_range(-1.0f32..1.0)).collect(),
            provider_id: "bench".into(),
        })
        .collect()
}

pub fn synthetic_documents(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let words: Vec<String> = (0..rng.gen_range(40..160))
                .map(|_| format!("word{}", rng.gen_range(0..2000)))
                .collect();
            format!("document {i}: {}", words.join(" "))
        })
        .collect()
}
