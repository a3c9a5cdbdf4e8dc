//! Corpus loading and the evaluate command.

use anyhow::{Context, Result};
use footprints_core::footprint::ArtifactEnvelope;
use footprints_core::gateway::Gateway;
use footprints_core::metrics::{render_table, subsampled_eval, Corpus, CorpusMetrics};
use serde_json::Value;
use std::path::{Path, PathBuf};

/// A corpus file is JSONL. Each line may be an artifact envelope (the
/// generate command's output), an object with a `text` field, a bare JSON
/// string, or — as a fallback — any non-JSON line taken verbatim.
pub fn load_corpus(path: &Path) -> Result<Corpus> {
    let raw = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read corpus {}", path.display()))?;
    let mut documents = Vec::new();
    for line in raw.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Ok(envelope) = serde_json::from_str::<ArtifactEnvelope>(line) {
            let artifact = envelope
                .to_artifact()
                .with_context(|| format!("bad payload in {}", path.display()))?;
            documents.push(artifact.payload.document_text());
            continue;
        }
        match serde_json::from_str::<Value>(line) {
            Ok(Value::String(s)) => documents.push(s),
            Ok(Value::Object(m)) if m.get("text").and_then(Value::as_str).is_some() => {
                documents.push(m["text"].as_str().unwrap().to_string());
            }
            Ok(other) => anyhow::bail!(
                "{}: JSON line is neither an artifact envelope, a string, nor an object with \
a \"text\" field: {other}",
                path.display()
            ),
            Err(_) => documents.push(line.to_string()),
        }
    }
    anyhow::ensure!(!documents.is_empty(), "{}: corpus is empty", path.display());
    Ok(Corpus::new(documents))
}

pub struct EvaluateArgs {
    pub corpora: Vec<PathBuf>,
    pub seed: u64,
    pub out: PathBuf,
    pub threshold: usize,
    pub repeats: usize,
}

/// Evaluate each corpus, print the aligned table, and write the JSON report.
pub fn cmd_evaluate(gateway: &Gateway, args: &EvaluateArgs) -> Result<Vec<(String, CorpusMetrics)>> {
    let mut rows: Vec<(String, CorpusMetrics)> = Vec::new();
    for path in &args.corpora {
        let corpus = load_corpus(path)?;
        let metrics = subsampled_eval(&corpus, gateway, args.threshold, args.repeats, args.seed)
            .with_context(|| format!("evaluating {}", path.display()))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| path.display().to_string());
        rows.push((name, metrics));
    }

    print!("{}", render_table(&rows));

    let report = serde_json::json!({
        "seed": args.seed,
        "subsample_threshold": args.threshold,
        "subsample_repeats": args.repeats,
        "provider_id": gateway.provider_id(),
        "corpora": rows
            .iter()
            .map(|(name, m)| serde_json::json!({ "name": name, "metrics": m }))
            .collect::<Vec<_>>(),
    });
    std::fs::write(&args.out, serde_json::to_string_pretty(&report)?)
        .with_context(|| format!("writing report {}", args.out.display()))?;
    Ok(rows)
}
