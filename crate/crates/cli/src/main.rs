//! Operator entry point: generate footprints, build/dedup the event memory,
//! and evaluate corpora.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

mod config;
mod evaluate;
mod generate;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use config::{Overrides, RunConfig, RunConfigFile};
use footprints_core::event_memory::{build_memory, save_memory, MemoryParams};
use footprints_core::gateway::config::{ProviderConfig, ProviderKind};
use footprints_core::gateway::Gateway;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "footprints",
    about = "Synthesize persona-grounded digital footprints and evaluate corpus diversity",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Run configuration file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for every random choice in the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Force the deterministic offline backend.
    #[arg(long)]
    offline: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate footprints: persona -> events -> artifacts, one directory per persona.
    Generate {
        #[command(flatten)]
        common: CommonFlags,
        /// Number of personas to synthesize.
        #[arg(long)]
        personas: Option<u32>,
        /// Output directory (one subdirectory per persona).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Acknowledge a forest cap above 300 nodes.
        #[arg(long)]
        ack_large_cap: bool,
    },
    /// Brainstorm + dedupe an event memory from persona descriptions.
    BuildMemory {
        #[command(flatten)]
        common: CommonFlags,
        /// Persona descriptions, one per line ('#' comments allowed).
        #[arg(long)]
        descriptions: Option<PathBuf>,
        /// Where to write the memory JSONL (sidecar index goes next to it).
        #[arg(long)]
        out: PathBuf,
        /// Seed events requested per description.
        #[arg(long, default_value_t = 10)]
        per_persona: usize,
    },
    /// Compute the intrinsic metric suite for one or more corpora.
    Evaluate {
        #[command(flatten)]
        common: CommonFlags,
        /// Corpus files (JSONL; artifact envelopes, {"text": ...} objects, or raw lines).
        #[arg(required = true)]
        corpora: Vec<PathBuf>,
        /// Report output path.
        #[arg(long, default_value = "metrics_report.json")]
        out: PathBuf,
        /// Subsample size threshold.
        #[arg(long, default_value_t = 1000)]
        threshold: usize,
        /// Number of subsamples averaged for large corpora.
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
}

fn provider_gateway(common: &CommonFlags) -> Result<Gateway> {
    let mut provider = match &common.config {
        Some(path) => {
            let file = RunConfigFile::load(path)?;
            match &file.provider_path {
                Some(p) => ProviderConfig::load(p)
                    .with_context(|| format!("provider config {}", p.display()))?,
                None => ProviderConfig::default(),
            }
        }
        None => ProviderConfig::default(),
    };
    if common.offline {
        provider.kind = ProviderKind::Mock;
    }
    Ok(provider.build_gateway(common.seed.unwrap_or(0))?)
}

/// Config/usage errors exit 2; runtime failures exit 1.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate {
            common,
            personas,
            out,
            ack_large_cap,
        } => {
            let file = match &common.config {
                Some(path) => Some(RunConfigFile::load(path).map_err(Failure::Config)?),
                None => None,
            };
            let overrides = Overrides {
                seed: common.seed,
                personas,
                out,
                offline: common.offline,
                ack_large_cap,
            };
            let config = RunConfig::resolve(file, &overrides).map_err(Failure::Config)?;
            let outcome = generate::cmd_generate(&config).map_err(Failure::Runtime)?;
            if outcome.succeeded == 0 {
                return Err(Failure::Runtime(anyhow::anyhow!(
                    "all {} persona runs failed",
                    config.personas
                )));
            }
            println!(
                "generated {}/{} footprints under {} ({} failed)",
                outcome.succeeded,
                config.personas,
                config.out_dir.display(),
                outcome.failed
            );
            Ok(())
        }
        Command::BuildMemory {
            common,
            descriptions,
            out,
            per_persona,
        } => {
            let gateway = provider_gateway(&common).map_err(Failure::Config)?;
            let raw = match &descriptions {
                Some(path) => std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))
                    .map_err(Failure::Config)?,
                None => config::EMBEDDED_DESCRIPTIONS.to_string(),
            };
            let list: Vec<String> = raw
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect();
            if list.is_empty() {
                return Err(Failure::Config(anyhow::anyhow!("no persona descriptions found")));
            }
            let params = MemoryParams {
                hash_seed: common.seed.unwrap_or(0),
                ..MemoryParams::default()
            };
            let (memory, warnings) = build_memory(&gateway, &list, per_persona, params)
                .map_err(|e| Failure::Runtime(e.into()))?;
            for warning in &warnings {
                log::warn!("memory build: {warning}");
            }
            save_memory(&memory, &out).map_err(|e| Failure::Runtime(e.into()))?;
            println!("wrote {} events to {}", memory.len(), out.display());
            Ok(())
        }
        Command::Evaluate {
            common,
            corpora,
            out,
            threshold,
            repeats,
        } => {
            let gateway = provider_gateway(&common).map_err(Failure::Config)?;
            let args = evaluate::EvaluateArgs {
                corpora,
                seed: common.seed.unwrap_or(0),
                out,
                threshold,
                repeats,
            };
            let rows = evaluate::cmd_evaluate(&gateway, &args).map_err(Failure::Config)?;
            log::info!("evaluated {} corpora", rows.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
        Err(Failure::Config(err)) => {
            eprintln!("config error: {err:#}");
            ExitCode::from(2)
        }
    }
}
