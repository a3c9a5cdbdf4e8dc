//! The end-to-end generate pipeline: persona -> seed retrieval -> event
//! forest -> artifacts -> footprint directory, for each requested persona.

use crate::config::{RunConfig, EMBEDDED_DESCRIPTIONS, EMBEDDED_PRIOR};
use anyhow::{Context, Result};
use footprints_core::demographics::{sample_draw, DemographicPrior};
use footprints_core::event_forest::{build_forest, save_forest, save_trace};
use footprints_core::event_memory::{build_memory, load_memory, EventMemory, MemoryParams};
use footprints_core::footprint::ics::export_ics;
use footprints_core::footprint::{assemble, export_jsonl, Provenance};
use footprints_core::gateway::{Gateway, GatewayError};
use footprints_core::hashing::splitmix64;
use footprints_core::persona::generate_profile;
use footprints_core::{artifact, event_memory, ArtifactKind};
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;

pub struct RunOutcome {
    pub succeeded: u32,
    pub failed: u32,
}

fn load_descriptions(config: &RunConfig) -> Result<Vec<String>> {
    let raw = match &config.descriptions_path {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("cannot read descriptions {}", path.display()))?,
        None => EMBEDDED_DESCRIPTIONS.to_string(),
    };
    let descriptions: Vec<String> = raw
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect();
    anyhow::ensure!(!descriptions.is_empty(), "no persona descriptions found");
    Ok(descriptions)
}

fn load_run_prior(config: &RunConfig) -> Result<DemographicPrior> {
    match &config.prior_path {
        Some(path) => footprints_core::demographics::load_prior(path)
            .with_context(|| format!("prior {}", path.display())),
        None => DemographicPrior::from_json(EMBEDDED_PRIOR).context("bundled prior"),
    }
}

fn obtain_memory(gateway: &Gateway, config: &RunConfig) -> Result<EventMemory> {
    if let Some(path) = &config.memory_path {
        return load_memory(path).with_context(|| format!("memory {}", path.display()));
    }
    let descriptions = load_descriptions(config)?;
    let params = MemoryParams {
        hash_seed: config.seed,
        ..MemoryParams::default()
    };
    let (memory, warnings) = build_memory(
        gateway,
        &descriptions,
        config.seed_events_per_description,
        params,
    )?;
    for warning in &warnings {
        log::warn!("memory build: {warning}");
    }
    anyhow::ensure!(!memory.is_empty(), "event memory came out empty");
    Ok(memory)
}

fn persona_seed(run_seed: u64, index: u32) -> u64 {
    splitmix64(run_seed ^ ((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn run_one_persona(
    gateway: &Gateway,
    config: &RunConfig,
    prior: &DemographicPrior,
    memory: &EventMemory,
    config_hash: &str,
    index: u32,
) -> Result<()> {
    let persona_id = format!("persona_{index:03}");
    let seed = persona_seed(config.seed, index);
    let dir = config.out_dir.join(&persona_id);
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let draw = sample_draw(prior, seed);
    let profile = generate_profile(gateway, &draw)?;

    let (bundle, retrieval_warnings) =
        event_memory::retrieve_seeds(gateway, &profile, memory, seed, config.retrieval)?;

    let build = build_forest(gateway, &bundle, &profile, config.forest_cap);
    let mut warnings = retrieval_warnings;
    warnings.extend(build.warnings.iter().cloned());

    let mut artifacts = Vec::with_capacity(build.forest.node_count());
    for (i, node) in build.forest.nodes.iter().enumerate() {
        let node_id = footprints_core::NodeId(i as u32);
        match artifact::engine::refine_auto(gateway, &node.payload, node_id, &profile, config.max_cycles) {
            Ok(refined) => artifacts.push(refined.artifact),
            Err(artifact::engine::EngineError::Gateway(err @ GatewayError::BudgetExceeded { .. })) => {
                return Err(err).context(format!("{persona_id}: budget exhausted"));
            }
            Err(err) => warnings.push(format!("artifact for node {i} skipped: {err}")),
        }
    }

    let provenance = Provenance {
        persona_id: persona_id.clone(),
        seed,
        backend_id: gateway.provider_id(),
        config_hash: config_hash.to_string(),
    };
    let footprint = assemble(profile, build.forest, artifacts, provenance.clone())?;

    write_json(&dir.join("profile.json"), &footprint.profile)?;
    save_forest(&footprint.forest, &dir.join("forest.json"))?;
    save_trace(&build.trace, &dir.join("expansion_trace.json"))?;
    export_jsonl(&footprint, &dir.join("footprint.jsonl"))?;
    export_ics(&footprint, &dir.join("calendar.ics"))?;
    write_json(&dir.join("provenance.json"), &provenance)?;
    write_json(&dir.join("warnings.json"), &warnings)?;

    let calendar_count = footprint
        .artifacts
        .iter()
        .filter(|a| a.kind() == ArtifactKind::CalendarEntry)
        .count();
    log::info!(
        "{persona_id}: {} events, {} artifacts ({calendar_count} calendar)",
        footprint.forest.node_count(),
        footprint.artifacts.len()
    );
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let body = serde_json::to_string_pretty(value)?;
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Run the whole pipeline; persona runs execute in a worker pool bounded by
/// the provider's concurrency limit. Returns per-persona success counts.
pub fn cmd_generate(config: &RunConfig) -> Result<RunOutcome> {
    let gateway = config
        .provider
        .build_gateway(config.seed)
        .context("building gateway")?
        .with_budget_cap_nanousd(Some(
            (config.budget_usd * footprints_core::gateway::ledger::NANO_PER_USD as f64).round()
                as u128,
        ));
    let prior = load_run_prior(config)?;
    let memory = obtain_memory(&gateway, config)?;
    let config_hash = config.provenance_hash();
    std::fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))?;

    let next = AtomicU32::new(0);
    let failures: Mutex<Vec<(u32, String)>> = Mutex::new(Vec::new());
    let workers = config.provider.concurrency.clamp(1, config.personas as usize);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= config.personas {
                    break;
                }
                if let Err(err) =
                    run_one_persona(&gateway, config, &prior, &memory, &config_hash, index)
                {
                    log::error!("persona_{index:03} failed: {err:#}");
                    failures.lock().unwrap().push((index, format!("{err:#}")));
                }
            });
        }
    });

    let failures = failures.into_inner().unwrap();
    let outcome = RunOutcome {
        succeeded: config.personas - failures.len() as u32,
        failed: failures.len() as u32,
    };

    let summary = serde_json::json!({
        "personas_requested": config.personas,
        "personas_succeeded": outcome.succeeded,
        "config_hash": config_hash,
        "provider_id": gateway.provider_id(),
        "total_cost_usd": footprints_core::gateway::ledger::format_usd(gateway.ledger().total_nanousd()),
        "gateway_calls": gateway.ledger().len(),
    });
    write_json(&config.out_dir.join("run_summary.json"), &summary)?;
    Ok(outcome)
}
