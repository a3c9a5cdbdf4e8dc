//! The event memory: brainstormed seed events, deduplicated with MinHash
//! LSH, indexed for the 30-similar / 30-uniform / 40-generated retrieval mix.

use crate::gateway::json_extract::first_json_array;
use crate::gateway::schema::{self, SchemaId};
use crate::gateway::{AgentRole, EmbeddingVector, Gateway, GatewayError, GenerationRequest};
use crate::minhash::{
    estimate_jaccard, minhash_signature, LshIndex, MinHashError, MinHashSignature, DEFAULT_BANDS,
    DEFAULT_K, DEFAULT_ROWS,
};
use crate::persona::PersonaProfile;
use crate::prompts;
use crate::vecmath::cosine_similarity;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;
use thiserror::Error;

pub const MEMORY_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_DEDUP_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Daily,
    Weekly,
    Monthly,
    Seasonally,
    Yearly,
    Once,
}

/// One brainstormed activity, before persona alignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEvent {
    pub event: String,
    pub detailed_description: String,
    pub frequency: Frequency,
}

impl SeedEvent {
    /// The text the deduper and the embedder both see.
    pub fn text(&self) -> String {
        format!("{} {}", self.event, self.detailed_description)
    }
}

/// MinHash/LSH family parameters; `bands * rows` must equal `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryParams {
    pub k: usize,
    pub bands: usize,
    pub rows: usize,
    pub hash_seed: u64,
    pub dedup_threshold: f64,
}

impl Default for MemoryParams {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            bands: DEFAULT_BANDS,
            rows: DEFAULT_ROWS,
            hash_seed: 0x00e7_ee75,
            dedup_threshold: DEFAULT_DEDUP_THRESHOLD,
        }
    }
}

#[derive(Debug, Error)]
pub enum MemoryError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("memory format version {found} unsupported (expected {MEMORY_FORMAT_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("memory is internally inconsistent: {0}")]
    Inconsistent(String),
    #[error("memory is empty")]
    Empty,
    #[error(transparent)]
    MinHash(#[from] MinHashError),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

/// Deduplicated event store plus its LSH and embedding indexes.
#[derive(Debug, Clone)]
pub struct EventMemory {
    pub params: MemoryParams,
    pub provider_id: String,
    events: Vec<SeedEvent>,
    signatures: Vec<MinHashSignature>,
    embeddings: Vec<EmbeddingVector>,
    lsh: LshIndex,
}

impl EventMemory {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[SeedEvent] {
        &self.events
    }

    pub fn embeddings(&self) -> &[EmbeddingVector] {
        &self.embeddings
    }

    /// Indices of stored events whose estimated Jaccard with `text` clears
    /// the threshold, via the LSH index (no full scan).
    pub fn near_duplicates(&self, text: &str, threshold: f64) -> Result<Vec<usize>, MinHashError> {
        let signature = minhash_signature(text, self.params.k, self.params.hash_seed)?;
        let mut out = Vec::new();
        for idx in self.lsh.candidates(&signature)? {
            if estimate_jaccard(&signature, &self.signatures[idx])? >= threshold {
                out.push(idx);
            }
        }
        Ok(out)
    }

    /// Index an existing curated event list (no brainstorming, no dedup).
    pub fn from_events(
        events: Vec<SeedEvent>,
        params: MemoryParams,
        embedder: &dyn crate::gateway::Embedder,
    ) -> Result<Self, MemoryError> {
        let mut signatures = Vec::with_capacity(events.len());
        let mut embeddings = Vec::with_capacity(events.len());
        let mut provider_id = String::from("unknown");
        for event in &events {
            signatures.push(minhash_signature(&event.text(), params.k, params.hash_seed)?);
            let embedding = embedder.embed(&event.text())?;
            provider_id = embedding.provider_id.clone();
            embeddings.push(embedding);
        }
        Self::from_parts(params, provider_id, events, signatures, embeddings)
    }

    fn from_parts(
        params: MemoryParams,
        provider_id: String,
        events: Vec<SeedEvent>,
        signatures: Vec<MinHashSignature>,
        embeddings: Vec<EmbeddingVector>,
    ) -> Result<Self, MemoryError> {
        if events.len() != signatures.len() || events.len() != embeddings.len() {
            return Err(MemoryError::Inconsistent(format!(
                "parallel lists differ: {} events, {} signatures, {} embeddings",
                events.len(),
                signatures.len(),
                embeddings.len()
            )));
        }
        if params.bands * params.rows != params.k {
            return Err(MemoryError::Inconsistent(format!(
                "bands({}) * rows({}) != k({})",
                params.bands, params.rows, params.k
            )));
        }
        let mut lsh = LshIndex::new(params.bands, params.rows, params.hash_seed);
        for signature in &signatures {
            lsh.insert(signature.clone())?;
        }
        Ok(Self {
            params,
            provider_id,
            events,
            signatures,
            embeddings,
            lsh,
        })
    }
}

/// Greedy in-order pass: an event is dropped iff the LSH index yields an
/// already-retained candidate with estimated Jaccard >= threshold. Events
/// with no word tokens cannot be hashed and are always retained.
pub fn dedup(events: &[SeedEvent], threshold: f64, params: &MemoryParams) -> Vec<SeedEvent> {
    let mut retained: Vec<SeedEvent> = Vec::new();
    let mut lsh = LshIndex::new(params.bands, params.rows, params.hash_seed);
    for event in events {
        let Ok(signature) = minhash_signature(&event.text(), params.k, params.hash_seed) else {
            retained.push(event.clone());
            continue;
        };
        let candidates = lsh.candidates(&signature).expect("family matches");
        let duplicate = candidates.iter().any(|&idx| {
            estimate_jaccard(&signature, lsh.signature(idx)).expect("family matches") >= threshold
        });
        if !duplicate {
            lsh.insert(signature).expect("family matches");
            retained.push(event.clone());
        }
    }
    retained
}

fn seed_event_from_value(value: &Value) -> Result<SeedEvent, Vec<schema::Violation>> {
    let as_list = json!([value]);
    let violations = schema::validate(SchemaId::SeedEventList, &as_list);
    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(serde_json::from_value(value.clone()).expect("validated seed event deserializes"))
}

/// Ask for seed events and keep the valid ones, recording a warning for each
/// skipped item.
fn request_seed_events(
    gateway: &Gateway,
    input: &Value,
    count: usize,
    warnings: &mut Vec<String>,
) -> Result<Vec<SeedEvent>, GatewayError> {
    let (system, user) = prompts::render_seed_events_prompt(input, count);
    let request =
        GenerationRequest::new(AgentRole::Event, system, user).with_schema(SchemaId::SeedEventList);
    let response = gateway.complete(&request)?;
    let Some(items) = first_json_array(&response.text) else {
        return Err(GatewayError::NoJsonFound);
    };
    let mut events = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        match seed_event_from_value(item) {
            Ok(event) => events.push(event),
            Err(violations) => warnings.push(format!(
                "skipped event {i}: {}",
                violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ")
            )),
        }
    }
    Ok(events)
}

/// Brainstorm `per_persona` events for each description, pool, dedupe, and
/// index. Failures on one description are recorded and the build continues;
/// a partial memory is allowed.
pub fn build_memory(
    gateway: &Gateway,
    persona_descriptions: &[String],
    per_persona: usize,
    params: MemoryParams,
) -> Result<(EventMemory, Vec<String>), MemoryError> {
    let mut warnings = Vec::new();
    let mut pooled: Vec<SeedEvent> = Vec::new();
    for (i, description) in persona_descriptions.iter().enumerate() {
        let input = json!({ "persona_description": description });
        match request_seed_events(gateway, &input, per_persona, &mut warnings) {
            Ok(events) => pooled.extend(events),
            Err(err) => warnings.push(format!("description {i}: {err}")),
        }
    }
    let deduped = dedup(&pooled, params.dedup_threshold, &params);
    let mut signatures = Vec::with_capacity(deduped.len());
    let mut embeddings = Vec::with_capacity(deduped.len());
    for event in &deduped {
        signatures.push(minhash_signature(&event.text(), params.k, params.hash_seed)?);
        embeddings.push(gateway.embed_text(&event.text())?);
    }
    let memory = EventMemory::from_parts(
        params,
        gateway.provider_id(),
        deduped,
        signatures,
        embeddings,
    )?;
    Ok((memory, warnings))
}

/// How many events each retrieval leg contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalCounts {
    pub similar: usize,
    pub uniform: usize,
    pub generated: usize,
}

impl Default for RetrievalCounts {
    fn default() -> Self {
        Self {
            similar: 30,
            uniform: 30,
            generated: 40,
        }
    }
}

/// Seed events chosen for one persona: most similar, uniform-for-diversity,
/// and freshly generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedBundle {
    pub similar: Vec<SeedEvent>,
    pub uniform: Vec<SeedEvent>,
    pub generated: Vec<SeedEvent>,
}

impl SeedBundle {
    pub fn len(&self) -> usize {
        self.similar.len() + self.uniform.len() + self.generated.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bundle order: similar, uniform, generated.
    pub fn iter(&self) -> impl Iterator<Item = &SeedEvent> {
        self.similar
            .iter()
            .chain(self.uniform.iter())
            .chain(self.generated.iter())
    }
}

/// Retrieve the seed mix for `profile`: top-`similar` by cosine against the
/// persona's occupation+routines digest (ties by memory index), `uniform`
/// sampled without replacement from the rest, and `generated` fresh events
/// prompted from the profile.
pub fn retrieve_seeds(
    gateway: &Gateway,
    profile: &PersonaProfile,
    memory: &EventMemory,
    seed: u64,
    counts: RetrievalCounts,
) -> Result<(SeedBundle, Vec<String>), MemoryError> {
    if memory.is_empty() {
        return Err(MemoryError::Empty);
    }
    let mut warnings = Vec::new();

    let query = gateway.embed_text(&prompts::profile_query_digest(profile))?;
    let mut ranked: Vec<(f64, usize)> = memory
        .embeddings
        .iter()
        .enumerate()
        .map(|(idx, emb)| (cosine_similarity(&query.values, &emb.values), idx))
        .collect();
    ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let similar_idx: Vec<usize> = ranked.iter().take(counts.similar).map(|(_, i)| *i).collect();

    let taken: std::collections::BTreeSet<usize> = similar_idx.iter().copied().collect();
    let mut rest: Vec<usize> = (0..memory.len()).filter(|i| !taken.contains(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ba5e);
    let uniform_take = counts.uniform.min(rest.len());
    // partial Fisher-Yates: the first `uniform_take` slots become the sample
    for i in 0..uniform_take {
        let j = rng.gen_range(i..rest.len());
        rest.swap(i, j);
    }
    let uniform_idx = &rest[..uniform_take];

    let digest = prompts::profile_digest(profile);
    let mut generated = request_seed_events(gateway, &digest, counts.generated, &mut warnings)
        .map_err(MemoryError::Gateway)?;
    if generated.len() < counts.generated {
        let retry_input = json!({
            "profile": digest,
            "note": "previous batch fell short; brainstorm additional distinct events",
        });
        match request_seed_events(gateway, &retry_input, counts.generated - generated.len(), &mut warnings) {
            Ok(more) => generated.extend(more),
            Err(err) => warnings.push(format!("generated-leg retry failed: {err}")),
        }
    }
    if generated.len() < counts.generated {
        warnings.push(format!(
            "generated leg produced {} of {} requested events",
            generated.len(),
            counts.generated
        ));
    }
    generated.truncate(counts.generated);

    let bundle = SeedBundle {
        similar: similar_idx.iter().map(|&i| memory.events[i].clone()).collect(),
        uniform: uniform_idx.iter().map(|&i| memory.events[i].clone()).collect(),
        generated,
    };
    Ok((bundle, warnings))
}

#[derive(Serialize, Deserialize)]
struct MemorySidecar {
    version: u32,
    params: MemoryParams,
    provider_id: String,
    signatures: Vec<MinHashSignature>,
    embeddings: Vec<EmbeddingVector>,
}

fn sidecar_path(events_path: &Path) -> std::path::PathBuf {
    let mut s = events_path.as_os_str().to_owned();
    s.push(".index.json");
    std::path::PathBuf::from(s)
}

/// Persist as one JSONL of events plus a versioned sidecar index file.
pub fn save_memory(memory: &EventMemory, events_path: &Path) -> Result<(), MemoryError> {
    let mut lines = String::new();
    for event in &memory.events {
        lines.push_str(&serde_json::to_string(event).expect("event serializes"));
        lines.push('\n');
    }
    std::fs::write(events_path, lines).map_err(|source| MemoryError::Io {
        path: events_path.display().to_string(),
        source,
    })?;
    let sidecar = MemorySidecar {
        version: MEMORY_FORMAT_VERSION,
        params: memory.params,
        provider_id: memory.provider_id.clone(),
        signatures: memory.signatures.clone(),
        embeddings: memory.embeddings.clone(),
    };
    let path = sidecar_path(events_path);
    std::fs::write(&path, serde_json::to_string(&sidecar).expect("sidecar serializes")).map_err(
        |source| MemoryError::Io {
            path: path.display().to_string(),
            source,
        },
    )?;
    Ok(())
}

pub fn load_memory(events_path: &Path) -> Result<EventMemory, MemoryError> {
    let raw = std::fs::read_to_string(events_path).map_err(|source| MemoryError::Io {
        path: events_path.display().to_string(),
        source,
    })?;
    let mut events = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let event: SeedEvent = serde_json::from_str(line).map_err(|e| MemoryError::Parse {
            path: events_path.display().to_string(),
            message: format!("line {}: {e}", i + 1),
        })?;
        events.push(event);
    }
    let side_path = sidecar_path(events_path);
    let raw = std::fs::read_to_string(&side_path).map_err(|source| MemoryError::Io {
        path: side_path.display().to_string(),
        source,
    })?;
    let sidecar: MemorySidecar = serde_json::from_str(&raw).map_err(|e| MemoryError::Parse {
        path: side_path.display().to_string(),
        message: e.to_string(),
    })?;
    if sidecar.version != MEMORY_FORMAT_VERSION {
        return Err(MemoryError::VersionMismatch {
            found: sidecar.version,
        });
    }
    EventMemory::from_parts(
        sidecar.params,
        sidecar.provider_id,
        events,
        sidecar.signatures,
        sidecar.embeddings,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::mock::MockProvider;
    use crate::gateway::testing::ScriptedProvider;
    use std::sync::Arc;

    fn ev(title: &str, description: &str) -> SeedEvent {
        SeedEvent {
            event: title.into(),
            detailed_description: description.into(),
            frequency: Frequency::Once,
        }
    }

    fn distinct_events(n: usize) -> Vec<SeedEvent> {
        // pairwise-disjoint vocabularies
        (0..n)
            .map(|i| {
                let words: Vec<String> = (0..30).map(|j| format!("w{i}x{j}")).collect();
                ev(&format!("event{i}"), &words.join(" "))
            })
            .collect()
    }

    #[test]
    fn identical_pair_drops_the_second() {
        let mut events = distinct_events(1);
        events.push(events[0].clone());
        let out = dedup(&events, 0.8, &MemoryParams::default());
        assert_eq!(out.len(), 1);
        assert_eq!(out[0], events[0]);
    }

    #[test]
    fn all_distinct_events_survive() {
        let events = distinct_events(12);
        let out = dedup(&events, 0.8, &MemoryParams::default());
        assert_eq!(out, events);
    }

    #[test]
    fn planted_near_duplicates_are_exactly_the_drops() {
        // 15 distinct events + 5 later near-copies with exact Jaccard >= 0.9
        let events = distinct_events(15);
        let mut planted = Vec::new();
        for i in 0..5 {
            let original = &events[i * 3];
            let mut copy = original.clone();
            // swap one token out of ~31: exact Jaccard 30/32 > 0.9
            copy.detailed_description = copy.detailed_description.replacen(
                &format!("w{}x0", i * 3),
                "swapped",
                1,
            );
            let exact = {
                let sa = crate::minhash::token_set(&original.text());
                let sb = crate::minhash::token_set(&copy.text());
                sa.intersection(&sb).count() as f64 / sa.union(&sb).count() as f64
            };
            assert!(exact >= 0.9, "planted pair {i} has exact Jaccard {exact}");
            planted.push(copy);
        }
        let mut all = events.clone();
        all.append(&mut planted);
        let out = dedup(&all, 0.8, &MemoryParams::default());
        assert_eq!(out, events, "exactly the 5 later copies must drop");
    }

    #[test]
    fn dedup_is_idempotent() {
        let mut events = distinct_events(10);
        events.push(events[2].clone());
        events.push(events[5].clone());
        let once = dedup(&events, 0.8, &MemoryParams::default());
        let twice = dedup(&once, 0.8, &MemoryParams::default());
        assert_eq!(once, twice);
    }

    #[test]
    fn build_memory_pools_and_validates() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(7)));
        let descriptions: Vec<String> = (0..3).map(|i| format!("persona description {i}")).collect();
        let (memory, _warnings) =
            build_memory(&gateway, &descriptions, 10, MemoryParams::default()).unwrap();
        assert!(memory.len() <= 30);
        assert!(!memory.is_empty());
    }

    #[test]
    fn invalid_frequency_is_skipped_with_warning() {
        let script = r#"[
            {"event": "good one", "detailed_description": "fine", "frequency": "weekly"},
            {"event": "bad one", "detailed_description": "broken", "frequency": "biweekly"}
        ]"#;
        let provider = ScriptedProvider::new(1).script(Some(SchemaId::SeedEventList), vec![script.into()]);
        let gateway = Gateway::new(Arc::new(provider));
        let (memory, warnings) =
            build_memory(&gateway, &["desc".into()], 2, MemoryParams::default()).unwrap();
        assert_eq!(memory.len(), 1);
        assert_eq!(memory.events()[0].event, "good one");
        assert!(warnings.iter().any(|w| w.contains("frequency")));
    }

    #[test]
    fn identical_description_outputs_dedupe_to_one_copy() {
        let script = r#"[
            {"event": "water the ferns", "detailed_description": "every plant on the balcony gets a turn", "frequency": "weekly"},
            {"event": "pay the water bill", "detailed_description": "quarterly utility payment through the portal", "frequency": "seasonally"}
        ]"#;
        let provider = ScriptedProvider::new(1)
            .script(Some(SchemaId::SeedEventList), vec![script.into(), script.into()]);
        let gateway = Gateway::new(Arc::new(provider));
        let (memory, _) =
            build_memory(&gateway, &["a".into(), "b".into()], 2, MemoryParams::default()).unwrap();
        assert_eq!(memory.len(), 2, "each event kept once across both lists");
    }

    fn memory_of(n: usize, gateway: &Gateway) -> EventMemory {
        EventMemory::from_events(distinct_events(n), MemoryParams::default(), gateway).unwrap()
    }

    #[test]
    fn retrieval_covers_a_60_event_memory_disjointly() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(7)));
        let profile = crate::persona::tests::mock_profile(7);
        let memory = memory_of(60, &gateway);
        let (bundle, _) =
            retrieve_seeds(&gateway, &profile, &memory, 7, RetrievalCounts::default()).unwrap();
        assert_eq!(bundle.similar.len(), 30);
        assert_eq!(bundle.uniform.len(), 30);
        assert_eq!(bundle.generated.len(), 40);
        let similar: std::collections::BTreeSet<String> =
            bundle.similar.iter().map(|e| e.event.clone()).collect();
        let uniform: std::collections::BTreeSet<String> =
            bundle.uniform.iter().map(|e| e.event.clone()).collect();
        assert!(similar.is_disjoint(&uniform));
        assert_eq!(similar.len() + uniform.len(), 60, "pigeonhole: all of memory used");
    }

    #[test]
    fn small_memory_shrinks_similar_and_empties_uniform() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(7)));
        let profile = crate::persona::tests::mock_profile(7);
        let memory = memory_of(10, &gateway);
        let (bundle, _) =
            retrieve_seeds(&gateway, &profile, &memory, 7, RetrievalCounts::default()).unwrap();
        assert_eq!(bundle.similar.len(), 10);
        assert_eq!(bundle.uniform.len(), 0);
        assert_eq!(bundle.generated.len(), 40);
    }

    #[test]
    fn planted_query_digest_event_ranks_first() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(7)));
        let profile = crate::persona::tests::mock_profile(7);
        let mut events = distinct_events(20);
        // event text equals the profile digest token-for-token -> cosine 1
        events.push(SeedEvent {
            event: profile.occupation.clone(),
            detailed_description: format!(
                "{} {}",
                profile.weekdays_routines, profile.weekend_routines
            ),
            frequency: Frequency::Daily,
        });
        let memory =
            EventMemory::from_events(events.clone(), MemoryParams::default(), &gateway).unwrap();
        let (bundle, _) =
            retrieve_seeds(&gateway, &profile, &memory, 3, RetrievalCounts::default()).unwrap();
        assert_eq!(bundle.similar[0], events[20]);
    }

    #[test]
    fn retrieval_is_deterministic_under_seed() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(7)));
        let profile = crate::persona::tests::mock_profile(7);
        let memory = memory_of(120, &gateway);
        let run = |seed| {
            let (bundle, _) =
                retrieve_seeds(&gateway, &profile, &memory, seed, RetrievalCounts::default())
                    .unwrap();
            serde_json::to_string(&bundle).unwrap()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6), "uniform leg must respond to the seed");
    }

    #[test]
    fn empty_memory_is_an_error() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(7)));
        let profile = crate::persona::tests::mock_profile(7);
        let memory = EventMemory::from_events(vec![], MemoryParams::default(), &gateway).unwrap();
        assert!(matches!(
            retrieve_seeds(&gateway, &profile, &memory, 1, RetrievalCounts::default()),
            Err(MemoryError::Empty)
        ));
    }

    #[test]
    fn near_duplicate_lookup_hits_the_stored_copy() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(4)));
        let (memory, _) =
            build_memory(&gateway, &["gardener".into()], 8, MemoryParams::default()).unwrap();
        let probe = memory.events()[0].text();
        let hits = memory.near_duplicates(&probe, 0.9).unwrap();
        assert_eq!(hits, vec![0]);
        assert!(memory
            .near_duplicates("completely unrelated zebra talk", 0.5)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn memory_round_trips_through_disk() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(4)));
        let (memory, _) = build_memory(
            &gateway,
            &["gardener".into(), "pilot".into()],
            6,
            MemoryParams::default(),
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("memory.jsonl");
        save_memory(&memory, &path).unwrap();
        let loaded = load_memory(&path).unwrap();
        assert_eq!(loaded.events(), memory.events());
        assert_eq!(loaded.embeddings().len(), memory.len());
        assert_eq!(loaded.provider_id, memory.provider_id);
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(4)));
        let (memory, _) = build_memory(&gateway, &["x".into()], 4, MemoryParams::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("memory.jsonl");
        save_memory(&memory, &path).unwrap();
        let side = sidecar_path(&path);
        let doctored = std::fs::read_to_string(&side)
            .unwrap()
            .replacen("\"version\":1", "\"version\":99", 1);
        std::fs::write(&side, doctored).unwrap();
        assert!(matches!(
            load_memory(&path),
            Err(MemoryError::VersionMismatch { found: 99 })
        ));
    }
}
