//! Per-persona footprint assembly and interchange exports.

pub mod ics;

use crate::artifact::{Artifact, ArtifactKind, ArtifactPayload, Direction};
use crate::event_forest::{EventForest, NodeId};
use crate::persona::PersonaProfile;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Run metadata carried with every footprint. Values are derived from the
/// run configuration only (never the wall clock), so reruns reproduce the
/// same bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub persona_id: String,
    pub seed: u64,
    pub backend_id: String,
    pub config_hash: String,
}

/// One persona's timeline: profile, event forest, and artifacts sorted by
/// their primary timestamp.
#[derive(Debug, Clone)]
pub struct DigitalFootprint {
    pub profile: PersonaProfile,
    pub forest: EventForest,
    pub artifacts: Vec<Artifact>,
    pub provenance: Provenance,
}

#[derive(Debug, Error)]
pub enum FootprintError {
    #[error("artifact {index} references event {event:?} absent from the forest")]
    DanglingEventRef { index: usize, event: NodeId },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

/// Sort artifacts into a timeline (stable: input order breaks ties) and
/// reject any artifact whose event id does not resolve in the forest.
pub fn assemble(
    profile: PersonaProfile,
    forest: EventForest,
    artifacts: Vec<Artifact>,
    provenance: Provenance,
) -> Result<DigitalFootprint, FootprintError> {
    for (index, artifact) in artifacts.iter().enumerate() {
        if !forest.contains(artifact.event_id) {
            return Err(FootprintError::DanglingEventRef {
                index,
                event: artifact.event_id,
            });
        }
    }
    let mut artifacts = artifacts;
    artifacts.sort_by_key(|a| a.payload.primary_timestamp());
    Ok(DigitalFootprint {
        profile,
        forest,
        artifacts,
        provenance,
    })
}

/// One JSONL line per artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactEnvelope {
    pub persona_id: String,
    pub event_id: NodeId,
    pub kind: ArtifactKind,
    pub direction: Direction,
    pub payload: Value,
}

impl ArtifactEnvelope {
    pub fn from_artifact(persona_id: &str, artifact: &Artifact) -> Self {
        Self {
            persona_id: persona_id.to_string(),
            event_id: artifact.event_id,
            kind: artifact.kind(),
            direction: artifact.direction,
            payload: artifact.payload.to_value(),
        }
    }

    pub fn to_artifact(&self) -> Result<Artifact, serde_json::Error> {
        Ok(Artifact {
            event_id: self.event_id,
            direction: self.direction,
            payload: ArtifactPayload::from_value(self.kind, self.payload.clone())?,
        })
    }
}

/// Write the footprint as envelope JSONL; returns the record count.
pub fn export_jsonl(footprint: &DigitalFootprint, path: &Path) -> Result<usize, FootprintError> {
    let io_err = |source| FootprintError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut writer = std::io::BufWriter::new(file);
    for artifact in &footprint.artifacts {
        let envelope = ArtifactEnvelope::from_artifact(&footprint.provenance.persona_id, artifact);
        let line = serde_json::to_string(&envelope).expect("envelope serializes");
        writeln!(writer, "{line}").map_err(io_err)?;
    }
    writer.flush().map_err(io_err)?;
    Ok(footprint.artifacts.len())
}

pub fn load_jsonl(path: &Path) -> Result<Vec<ArtifactEnvelope>, FootprintError> {
    let raw = std::fs::read_to_string(path).map_err(|source| FootprintError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let envelope: ArtifactEnvelope =
            serde_json::from_str(line).map_err(|e| FootprintError::Parse {
                path: path.display().to_string(),
                line: i + 1,
                message: e.to_string(),
            })?;
        out.push(envelope);
    }
    Ok(out)
}
