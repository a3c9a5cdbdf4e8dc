//! Exact spend accounting in integer nano-USD.
//!
//! Prices are configured as USD per million tokens and converted once to
//! nano-USD per token (1 USD / 1M tokens = 1000 nUSD/token), so every ledger
//! entry and the running total are exact integers; no float drift can
//! accumulate over a long run.

use serde::{Deserialize, Serialize};
use std::sync::Mutex;

pub const NANO_PER_USD: u128 = 1_000_000_000;

/// Which pipeline role issued a call; used to audit call budgets per stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    Persona,
    Event,
    ArtifactGenerator,
    Critic,
    Judge,
    Embedding,
    Other,
}

/// Per-token prices in nano-USD.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceTable {
    pub input_nanousd_per_token: u64,
    pub output_nanousd_per_token: u64,
}

impl PriceTable {
    /// Convert the configured USD-per-million-token prices. Resolution is
    /// 0.001 USD per million tokens (= 1 nUSD per token).
    pub fn from_usd_per_million(input: f64, output: f64) -> Self {
        Self {
            input_nanousd_per_token: (input * 1000.0).round() as u64,
            output_nanousd_per_token: (output * 1000.0).round() as u64,
        }
    }

    pub fn call_cost_nanousd(&self, input_tokens: u64, output_tokens: u64) -> u128 {
        input_tokens as u128 * self.input_nanousd_per_token as u128
            + output_tokens as u128 * self.output_nanousd_per_token as u128
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CallRecord {
    pub agent_role: AgentRole,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub prices: PriceTable,
    pub cost_nanousd: u128,
}

#[derive(Debug, Default)]
struct LedgerInner {
    records: Vec<CallRecord>,
    total_nanousd: u128,
}

/// Thread-safe append-only call ledger.
#[derive(Debug, Default)]
pub struct CostLedger {
    inner: Mutex<LedgerInner>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, agent_role: AgentRole, input_tokens: u64, output_tokens: u64, prices: PriceTable) -> u128 {
        let cost = prices.call_cost_nanousd(input_tokens, output_tokens);
        let mut inner = self.inner.lock().expect("ledger poisoned");
        inner.total_nanousd += cost;
        inner.records.push(CallRecord {
            agent_role,
            input_tokens,
            output_tokens,
            prices,
            cost_nanousd: cost,
        });
        cost
    }

    pub fn total_nanousd(&self) -> u128 {
        self.inner.lock().expect("ledger poisoned").total_nanousd
    }

    pub fn total_usd(&self) -> f64 {
        self.total_nanousd() as f64 / NANO_PER_USD as f64
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("ledger poisoned").records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot of all records, in call order.
    pub fn records(&self) -> Vec<CallRecord> {
        self.inner.lock().expect("ledger poisoned").records.clone()
    }

    pub fn count_by_role(&self, role: AgentRole) -> usize {
        self.inner
            .lock()
            .expect("ledger poisoned")
            .records
            .iter()
            .filter(|r| r.agent_role == role)
            .count()
    }
}

/// Render nano-USD with full precision (for reports and provenance).
pub fn format_usd(nanousd: u128) -> String {
    let whole = nanousd / NANO_PER_USD;
    let frac = nanousd % NANO_PER_USD;
    let s = format!("{whole}.{frac:09}");
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}
