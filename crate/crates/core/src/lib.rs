//! Persona-grounded digital footprint synthesis.
//!
//! A three-stage agent pipeline turns a demographic draw into a full digital
//! footprint, with a deterministic offline backend for reproducible runs:
//!
//! 1. **Persona** — sample demographics from a prior, expand into a profile
//!    with a social graph and routines ([`demographics`], [`persona`]).
//! 2. **Events** — retrieve/brainstorm seed events from a MinHash-deduplicated
//!    event memory, align them to the persona, and expand breadth-first into
//!    an event forest ([`event_memory`], [`event_forest`]).
//! 3. **Artifacts** — for each event, outline → generate → three critics →
//!    revise until approved or out of budget ([`artifact`]), then assemble
//!    and export the timeline ([`footprint`]).
//!
//! [`metrics`] implements the intrinsic evaluation suite (pairwise
//! correlation, remote-clique, grid entropy, link/length averages, judge
//! scoring) with the fixed-size subsampling protocol, and [`ablation`] holds
//! the template-based baseline generator used for comparison runs.

pub mod ablation;
pub mod artifact;
pub mod demographics;
pub mod event_forest;
pub mod event_memory;
pub mod footprint;
pub mod gateway;
pub mod hashing;
pub mod metrics;
pub mod minhash;
pub mod persona;
pub mod prompts;
pub mod vecmath;

pub use artifact::engine::{refine, refine_auto, Critique, CritiqueAxis, RefinedArtifact, Verdict};
pub use artifact::{Artifact, ArtifactKind, ArtifactPayload, Direction};
pub use demographics::{load_prior, sample_draw, DemographicDraw, DemographicPrior};
pub use event_forest::{build_forest, EventForest, ExpandedEvent, NodeId};
pub use event_memory::{
    build_memory, dedup, retrieve_seeds, EventMemory, SeedBundle, SeedEvent,
};
pub use footprint::{assemble, DigitalFootprint, Provenance};
pub use gateway::{
    AgentRole, CostLedger, EmbeddingVector, Gateway, GatewayError, GenerationRequest,
    GenerationResponse, ProviderConfig, SchemaId,
};
pub use metrics::{subsampled_eval, Corpus, CorpusMetrics};
pub use persona::{generate_profile, validate_profile, PersonaProfile};
