//! The event agent (stage 2): align seed events to the persona and expand
//! them breadth-first into an event forest, with per-node reflection, under
//! a hard node cap.

use crate::event_memory::{Frequency, SeedBundle, SeedEvent};
use crate::gateway::json_extract::first_json_array;
use crate::gateway::schema::{self, SchemaId, TIMESTAMP_FORMAT};
use crate::gateway::{AgentRole, Gateway, GatewayError, GenerationRequest};
use crate::hashing::text_key;
use crate::persona::PersonaProfile;
use crate::prompts;
use chrono::{Duration, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::VecDeque;
use std::path::Path;
use thiserror::Error;

pub const DEFAULT_FOREST_CAP: usize = 300;

/// Zone-less timestamps serialize as `%Y-%m-%dT%H:%M:%S` strings.
pub mod ts {
    use super::{NaiveDateTime, TIMESTAMP_FORMAT};
    use serde::{self, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &NaiveDateTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&t.format(TIMESTAMP_FORMAT).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDateTime, D::Error> {
        let raw = String::deserialize(d)?;
        NaiveDateTime::parse_from_str(&raw, TIMESTAMP_FORMAT).map_err(serde::de::Error::custom)
    }
}

/// A seed event after persona alignment: concrete enough for a calendar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedEvent {
    pub event: String,
    pub detailed_description: String,
    pub frequency: Frequency,
    /// Blank when the event has no single venue.
    #[serde(default)]
    pub location: String,
    /// Names from the owning profile's social graph only.
    #[serde(default)]
    pub other_participants: Vec<String>,
    #[serde(with = "ts")]
    pub start_time: NaiveDateTime,
    #[serde(with = "ts")]
    pub end_time: NaiveDateTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventNode {
    pub payload: ExpandedEvent,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub depth: u32,
    pub reflected: bool,
}

/// Arena-backed set of event trees. `node_count <= cap` always holds after
/// a build.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventForest {
    pub trees: Vec<NodeId>,
    pub nodes: Vec<EventNode>,
}

impl EventForest {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Option<&EventNode> {
        self.nodes.get(id.0 as usize)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        (id.0 as usize) < self.nodes.len()
    }

    fn push(&mut self, payload: ExpandedEvent, parent: Option<NodeId>, reflected: bool) -> NodeId {
        let depth = parent.map_or(0, |p| self.nodes[p.0 as usize].depth + 1);
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(EventNode {
            payload,
            parent,
            children: Vec::new(),
            depth,
            reflected,
        });
        match parent {
            Some(p) => self.nodes[p.0 as usize].children.push(id),
            None => self.trees.push(id),
        }
        id
    }
}

/// Order in which nodes were expanded; persisted so the breadth-first
/// property is checkable after the fact.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExpansionTrace {
    pub expanded: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub node: NodeId,
    pub depth: u32,
}

#[derive(Debug, Error)]
pub enum EventError {
    #[error("alignment failed after repair: {0}")]
    AlignmentFailed(String),
    #[error("expansion failed after repair: {0}")]
    ExpansionFailed(String),
    #[error("reflection failed: {0}")]
    ReflectionFailed(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

fn parse_expanded_event(value: &Value) -> Result<ExpandedEvent, String> {
    let violations = schema::validate(SchemaId::ExpandedEvent, value);
    if !violations.is_empty() {
        return Err(violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; "));
    }
    serde_json::from_value(value.clone()).map_err(|e| e.to_string())
}

/// Drop participants outside the profile's social graph; the event itself
/// is kept.
fn filter_participants(event: &mut ExpandedEvent, profile: &PersonaProfile, warnings: &mut Vec<String>) {
    let known = profile.social_names();
    event.other_participants.retain(|name| {
        let keep = known.contains(name);
        if !keep {
            warnings.push(format!(
                "dropped unknown participant \"{name}\" from \"{}\"",
                event.event
            ));
        }
        keep
    });
}

/// Specialize one seed event to the persona. One repair round, then
/// `AlignmentFailed`.
pub fn align_seed(
    gateway: &Gateway,
    seed: &SeedEvent,
    profile: &PersonaProfile,
) -> Result<(ExpandedEvent, Vec<String>), EventError> {
    let seed_value = serde_json::to_value(seed).expect("seed serializes");
    let digest = prompts::profile_digest(profile);
    let (system, user) = prompts::render_alignment_prompt(&seed_value, &digest);
    let request =
        GenerationRequest::new(AgentRole::Event, system, user).with_schema(SchemaId::ExpandedEvent);
    let value = gateway
        .complete_json_with_repair(&request, SchemaId::ExpandedEvent)
        .map_err(|e| match e {
            GatewayError::SchemaViolation { .. } | GatewayError::NoJsonFound => {
                EventError::AlignmentFailed(e.to_string())
            }
            other => EventError::Gateway(other),
        })?;
    let mut event = parse_expanded_event(&value).map_err(EventError::AlignmentFailed)?;
    let mut warnings = Vec::new();
    filter_participants(&mut event, profile, &mut warnings);
    Ok((event, warnings))
}

/// Ask for sub-events of `node`. Invalid children are dropped individually;
/// an empty list means the event is atomic.
pub fn expand_event(
    gateway: &Gateway,
    node: &ExpandedEvent,
    profile: &PersonaProfile,
) -> Result<(Vec<ExpandedEvent>, Vec<String>), EventError> {
    let event_value = prompts::event_to_value(node);
    let digest = prompts::profile_digest(profile);
    let (system, user) = prompts::render_expansion_prompt(&event_value, &digest);
    let request = GenerationRequest::new(AgentRole::Event, system, user)
        .with_schema(SchemaId::ExpandedEventList);
    let response = gateway.complete(&request)?;
    let items = match first_json_array(&response.text) {
        Some(items) => items,
        None => {
            // one repair round: restate the contract
            let mut repair = request.clone();
            repair.user_prompt = format!(
                "{}\n\nYour previous reply contained no JSON list. Reply with only a JSON list \
(possibly empty) of event objects.",
                request.user_prompt
            );
            let response = gateway.complete(&repair)?;
            first_json_array(&response.text)
                .ok_or_else(|| EventError::ExpansionFailed("no JSON list in reply".into()))?
        }
    };
    let mut children = Vec::new();
    let mut warnings = Vec::new();
    for (i, item) in items.iter().enumerate() {
        match parse_expanded_event(item) {
            Ok(mut child) => {
                filter_participants(&mut child, profile, &mut warnings);
                children.push(child);
            }
            Err(message) => warnings.push(format!("dropped invalid child {i}: {message}")),
        }
    }
    Ok((children, warnings))
}

/// Self-check one event: returns the (possibly revised) event and whether
/// reflection succeeded. A failed or invalid reflection keeps the original,
/// unreflected.
pub fn reflect_event(
    gateway: &Gateway,
    event: &ExpandedEvent,
    profile: &PersonaProfile,
) -> (ExpandedEvent, bool) {
    let event_value = prompts::event_to_value(event);
    let digest = prompts::profile_digest(profile);
    let (system, user) = prompts::render_reflection_prompt(&event_value, &digest);
    let request =
        GenerationRequest::new(AgentRole::Event, system, user).with_schema(SchemaId::ExpandedEvent);
    match gateway.complete_json_with_repair(&request, SchemaId::ExpandedEvent) {
        Ok(value) => match parse_expanded_event(&value) {
            Ok(mut revised) => {
                let mut warnings = Vec::new();
                filter_participants(&mut revised, profile, &mut warnings);
                (revised, true)
            }
            Err(_) => (event.clone(), false),
        },
        Err(_) => (event.clone(), false),
    }
}

/// Deterministic fallback when alignment fails outright: promote the seed
/// as an atomic event with times derived from its text hash.
fn promote_seed(seed: &SeedEvent) -> ExpandedEvent {
    let key = text_key(&seed.text(), 0x9e3779b9);
    let base = NaiveDate::from_ymd_opt(2024, 1, 1)
        .unwrap()
        .and_hms_opt(9, 0, 0)
        .unwrap();
    let start = base + Duration::days((key % 700) as i64) + Duration::hours(((key >> 12) % 8) as i64);
    ExpandedEvent {
        event: seed.event.clone(),
        detailed_description: seed.detailed_description.clone(),
        frequency: seed.frequency,
        location: String::new(),
        other_participants: Vec::new(),
        start_time: start,
        end_time: start + Duration::hours(1),
    }
}

/// Result of one forest build.
#[derive(Debug)]
pub struct ForestBuild {
    pub forest: EventForest,
    pub trace: ExpansionTrace,
    pub warnings: Vec<String>,
}

/// Build the forest: align every bundle seed into a root (bundle order:
/// similar, uniform, generated), then expand breadth-first, reflecting each
/// child before insertion. Expansion stops permanently once `cap` nodes
/// exist; the in-flight child batch is truncated so the count lands exactly
/// on the cap. Per-node failures degrade to atomic nodes, never abort.
pub fn build_forest(
    gateway: &Gateway,
    bundle: &SeedBundle,
    profile: &PersonaProfile,
    cap: usize,
) -> ForestBuild {
    let mut forest = EventForest::default();
    let mut trace = ExpansionTrace::default();
    let mut warnings = Vec::new();
    let mut queue: VecDeque<NodeId> = VecDeque::new();

    for seed in bundle.iter() {
        if forest.node_count() >= cap {
            warnings.push("node cap reached while inserting roots; remaining seeds skipped".into());
            break;
        }
        let aligned = match align_seed(gateway, seed, profile) {
            Ok((event, mut w)) => {
                warnings.append(&mut w);
                event
            }
            Err(err) => {
                warnings.push(format!("alignment of \"{}\" failed: {err}", seed.event));
                promote_seed(seed)
            }
        };
        let (reflected_event, reflected) = reflect_event(gateway, &aligned, profile);
        let id = forest.push(reflected_event, None, reflected);
        queue.push_back(id);
    }

    let mut expansion_open = forest.node_count() < cap;
    while let Some(id) = queue.pop_front() {
        if !expansion_open {
            break;
        }
        let depth = forest.nodes[id.0 as usize].depth;
        trace.expanded.push(TraceEntry { node: id, depth });
        let payload = forest.nodes[id.0 as usize].payload.clone();
        let children = match expand_event(gateway, &payload, profile) {
            Ok((children, mut w)) => {
                warnings.append(&mut w);
                children
            }
            Err(err) => {
                warnings.push(format!("expansion of \"{}\" failed; kept atomic: {err}", payload.event));
                Vec::new()
            }
        };
        for child in children {
            if forest.node_count() >= cap {
                expansion_open = false;
                break;
            }
            let (reflected_child, reflected) = reflect_event(gateway, &child, profile);
            let child_id = forest.push(reflected_child, Some(id), reflected);
            queue.push_back(child_id);
        }
        if forest.node_count() >= cap {
            expansion_open = false;
        }
    }

    ForestBuild {
        forest,
        trace,
        warnings,
    }
}

#[derive(Debug, Error)]
pub enum ForestIoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
}

pub fn save_forest(forest: &EventForest, path: &Path) -> Result<(), ForestIoError> {
    let body = serde_json::to_string_pretty(forest).expect("forest serializes");
    std::fs::write(path, body).map_err(|source| ForestIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_forest(path: &Path) -> Result<EventForest, ForestIoError> {
    let raw = std::fs::read_to_string(path).map_err(|source| ForestIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&raw).map_err(|source| ForestIoError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_trace(trace: &ExpansionTrace, path: &Path) -> Result<(), ForestIoError> {
    let body = serde_json::to_string_pretty(trace).expect("trace serializes");
    std::fs::write(path, body).map_err(|source| ForestIoError::Io {
        path: path.display().to_string(),
        source,
    })
}
