//! Run configuration: file format, flag overrides, validation, and the
//! provenance hash.

use anyhow::{bail, Context, Result};
use footprints_core::event_memory::RetrievalCounts;
use footprints_core::gateway::config::{ProviderConfig, ProviderKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const DEFAULT_FOREST_CAP: usize = 300;
pub const DEFAULT_MAX_CYCLES: u32 = 3;
pub const MAX_CYCLES_CEILING: u32 = 5;
/// Default per-persona budget in USD, from the cost model's end-to-end
/// upper bound per artifact pipeline.
pub const DEFAULT_BUDGET_PER_PERSONA_USD: f64 = 0.57;

pub const EMBEDDED_PRIOR: &str = include_str!("../fixtures/example_prior.json");
pub const EMBEDDED_DESCRIPTIONS: &str = include_str!("../fixtures/persona_descriptions.txt");

/// On-disk run configuration. Every field has a default so `--offline`
/// smoke runs need no file at all.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    /// Path to a provider config JSON; omitted means the mock backend.
    pub provider_path: Option<PathBuf>,
    /// Path to a demographic prior; omitted means the bundled example.
    pub prior_path: Option<PathBuf>,
    pub personas: Option<u32>,
    pub seed: Option<u64>,
    pub forest_cap: Option<usize>,
    pub max_cycles: Option<u32>,
    pub out_dir: Option<PathBuf>,
    /// Total budget cap in USD; omitted means 0.57 x persona count.
    pub budget_usd: Option<f64>,
    /// Pre-built event memory (JSONL + sidecar); omitted means build one.
    pub memory_path: Option<PathBuf>,
    /// Persona descriptions for memory bootstrap; omitted means the bundled set.
    pub descriptions_path: Option<PathBuf>,
    pub seed_events_per_description: Option<usize>,
    pub retrieval: Option<RetrievalCounts>,
    /// Required acknowledgment when forest_cap exceeds 300.
    #[serde(default)]
    pub acknowledge_cap_override: bool,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&raw).with_context(|| format!("cannot parse config {}", path.display()))
    }
}

/// Flag overrides shared by the subcommands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub personas: Option<u32>,
    pub out: Option<PathBuf>,
    pub offline: bool,
    pub ack_large_cap: bool,
}

/// Fully-resolved configuration for one generate run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub provider: ProviderConfig,
    pub prior_path: Option<PathBuf>,
    pub personas: u32,
    pub seed: u64,
    pub forest_cap: usize,
    pub max_cycles: u32,
    #[serde(skip)] // output location must not perturb the provenance hash
    pub out_dir: PathBuf,
    pub budget_usd: f64,
    pub memory_path: Option<PathBuf>,
    pub descriptions_path: Option<PathBuf>,
    pub seed_events_per_description: usize,
    pub retrieval: RetrievalCounts,
}

impl RunConfig {
    pub fn resolve(file: Option<RunConfigFile>, flags: &Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        let mut provider = match &file.provider_path {
            Some(path) => ProviderConfig::load(path)
                .with_context(|| format!("provider config {}", path.display()))?,
            None => ProviderConfig::default(),
        };
        if flags.offline {
            provider.kind = ProviderKind::Mock;
        }
        let personas = flags.personas.or(file.personas).unwrap_or(1);
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let forest_cap = file.forest_cap.unwrap_or(DEFAULT_FOREST_CAP);
        let max_cycles = file.max_cycles.unwrap_or(DEFAULT_MAX_CYCLES);
        let out_dir = flags
            .out
            .clone()
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from("out"));
        let budget_usd = file
            .budget_usd
            .or(provider.budget_usd)
            .unwrap_or(DEFAULT_BUDGET_PER_PERSONA_USD * personas as f64);

        if personas == 0 {
            bail!("persona count must be positive");
        }
        if forest_cap == 0 {
            bail!("forest cap must be positive");
        }
        if forest_cap > DEFAULT_FOREST_CAP && !(file.acknowledge_cap_override || flags.ack_large_cap) {
            bail!(
                "forest_cap {forest_cap} exceeds {DEFAULT_FOREST_CAP}; pass --ack-large-cap (or set \
acknowledge_cap_override) to confirm"
            );
        }
        if max_cycles == 0 || max_cycles > MAX_CYCLES_CEILING {
            bail!("max_cycles must be in 1..={MAX_CYCLES_CEILING}, got {max_cycles}");
        }
        if budget_usd < 0.0 || !budget_usd.is_finite() {
            bail!("budget must be finite and non-negative");
        }

        Ok(Self {
            provider,
            prior_path: file.prior_path,
            personas,
            seed,
            forest_cap,
            max_cycles,
            out_dir,
            budget_usd,
            memory_path: file.memory_path,
            descriptions_path: file.descriptions_path,
            seed_events_per_description: file.seed_events_per_description.unwrap_or(10),
            retrieval: file.retrieval.unwrap_or_default(),
        })
    }

    /// Hash over every generation-relevant parameter (the output directory
    /// is deliberately excluded so reruns into different directories
    /// compare equal).
    pub fn provenance_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_offline() {
        let config = RunConfig::resolve(
            None,
            &Overrides {
                offline: true,
                seed: Some(9),
                personas: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(config.personas, 3);
        assert_eq!(config.forest_cap, 300);
        assert!((config.budget_usd - 0.57 * 3.0).abs() < 1e-9);
    }

    #[test]
    fn oversized_cap_needs_acknowledgment() {
        let file = RunConfigFile {
            forest_cap: Some(500),
            ..Default::default()
        };
        assert!(RunConfig::resolve(Some(file.clone()), &Overrides::default()).is_err());
        let ok = RunConfig::resolve(
            Some(file),
            &Overrides {
                ack_large_cap: true,
                ..Default::default()
            },
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn cycle_ceiling_is_enforced() {
        let file = RunConfigFile {
            max_cycles: Some(6),
            ..Default::default()
        };
        assert!(RunConfig::resolve(Some(file), &Overrides::default()).is_err());
    }

    #[test]
    fn hash_ignores_out_dir_only() {
        let base = RunConfig::resolve(None, &Overrides { offline: true, ..Default::default() }).unwrap();
        let mut moved = base.clone();
        moved.out_dir = PathBuf::from("elsewhere");
        assert_eq!(base.provenance_hash(), moved.provenance_hash());
        let mut reseeded = base.clone();
        reseeded.seed = 1234;
        assert_ne!(base.provenance_hash(), reseeded.provenance_hash());
    }

    #[test]
    fn embedded_fixtures_parse() {
        footprints_core::demographics::DemographicPrior::from_json(EMBEDDED_PRIOR).unwrap();
        let count = EMBEDDED_DESCRIPTIONS
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .count();
        assert!(count >= 10);
    }
}
