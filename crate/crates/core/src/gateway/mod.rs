//! Uniform access to text-generation and embedding backends.
//!
//! A [`Gateway`] wraps any [`Provider`] with the cross-cutting concerns every
//! pipeline stage needs: request validation, a hard cap on concurrent
//! in-flight calls, bounded retry with exponential backoff for transient
//! failures, a budget guard, and exact cost accounting. The bundled
//! [`mock::MockProvider`] makes the whole pipeline runnable offline and
//! bit-reproducible under a fixed seed.

pub mod config;
pub mod http;
pub mod json_extract;
pub mod ledger;
pub mod mock;
pub mod schema;
pub mod testing;

pub use config::ProviderConfig;
pub use json_extract::extract_json;
pub use ledger::{AgentRole, CallRecord, CostLedger, PriceTable};
pub use schema::{SchemaId, Violation};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;
use thiserror::Error;

/// One text-generation request.
#[derive(Debug, Clone)]
pub struct GenerationRequest {
    pub agent_role: AgentRole,
    pub system_prompt: String,
    pub user_prompt: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub schema_hint: Option<SchemaId>,
}

impl GenerationRequest {
    pub fn new(agent_role: AgentRole, system_prompt: impl Into<String>, user_prompt: impl Into<String>) -> Self {
        Self {
            agent_role,
            system_prompt: system_prompt.into(),
            user_prompt: user_prompt.into(),
            temperature: 0.9,
            max_output_tokens: 4096,
            schema_hint: None,
        }
    }

    pub fn with_schema(mut self, schema: SchemaId) -> Self {
        self.schema_hint = Some(schema);
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    fn validate(&self) -> Result<(), GatewayError> {
        if self.user_prompt.trim().is_empty() {
            return Err(GatewayError::InvalidRequest("user_prompt is empty".into()));
        }
        if self.system_prompt.trim().is_empty() {
            return Err(GatewayError::InvalidRequest("system_prompt is empty".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(GatewayError::InvalidRequest("max_output_tokens must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationResponse {
    pub text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub provider_id: String,
}

/// Fixed-dimension embedding tagged with the provider that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f32>,
    pub provider_id: String,
}

impl EmbeddingVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Raw provider output before ledger accounting.
#[derive(Debug, Clone)]
pub struct ProviderOutput {
    pub text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    /// Worth retrying: timeouts, 429/5xx, connection resets.
    #[error("transient provider failure: {0}")]
    Transient(String),
    /// Not worth retrying: auth, bad request, unsupported model.
    #[error("fatal provider failure: {0}")]
    Fatal(String),
}

/// A text-generation + embedding backend.
pub trait Provider: Send + Sync {
    fn id(&self) -> String;
    fn complete(&self, request: &GenerationRequest) -> Result<ProviderOutput, ProviderError>;
    fn embed(&self, text: &str) -> Result<Vec<f32>, ProviderError>;
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("provider unavailable after {attempts} attempts: {last_error}")]
    ProviderUnavailable { attempts: u32, last_error: String },
    #[error("budget exceeded: spent {spent_nanousd} nUSD of cap {cap_nanousd} nUSD")]
    BudgetExceeded { spent_nanousd: u128, cap_nanousd: u128 },
    #[error("no JSON value found in model output")]
    NoJsonFound,
    #[error("output violates {} schema: {}", schema.name(), violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    SchemaViolation { schema: SchemaId, violations: Vec<Violation> },
}

/// Retry policy for transient provider failures.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub multiplier: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            base_delay: Duration::from_millis(200),
            multiplier: 2,
        }
    }
}

impl RetryPolicy {
    fn delay_for(&self, attempt: u32) -> Duration {
        self.base_delay * self.multiplier.saturating_pow(attempt)
    }
}

/// Counting semaphore; caps concurrent in-flight provider calls.
struct Semaphore {
    permits: Mutex<usize>,
    cv: Condvar,
}

impl Semaphore {
    fn new(permits: usize) -> Self {
        Self {
            permits: Mutex::new(permits.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> SemaphoreGuard<'_> {
        let mut permits = self.permits.lock().expect("semaphore poisoned");
        while *permits == 0 {
            permits = self.cv.wait(permits).expect("semaphore poisoned");
        }
        *permits -= 1;
        SemaphoreGuard { sem: self }
    }
}

struct SemaphoreGuard<'a> {
    sem: &'a Semaphore,
}

impl Drop for SemaphoreGuard<'_> {
    fn drop(&mut self) {
        let mut permits = self.sem.permits.lock().expect("semaphore poisoned");
        *permits += 1;
        self.sem.cv.notify_one();
    }
}

/// Text embedding source; implemented by [`Gateway`] and by bare providers
/// in tests.
pub trait Embedder: Sync {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, GatewayError>;
}

/// Provider wrapper shared by all pipeline agents. Cheap to clone.
#[derive(Clone)]
pub struct Gateway {
    provider: Arc<dyn Provider>,
    ledger: Arc<CostLedger>,
    limiter: Arc<Semaphore>,
    retry: RetryPolicy,
    prices: PriceTable,
    budget_cap_nanousd: Option<u128>,
}

impl Gateway {
    pub fn new(provider: Arc<dyn Provider>) -> Self {
        Self {
            provider,
            ledger: Arc::new(CostLedger::new()),
            limiter: Arc::new(Semaphore::new(8)),
            retry: RetryPolicy::default(),
            prices: PriceTable::default(),
            budget_cap_nanousd: None,
        }
    }

    pub fn with_concurrency(mut self, max_in_flight: usize) -> Self {
        self.limiter = Arc::new(Semaphore::new(max_in_flight));
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn with_prices(mut self, prices: PriceTable) -> Self {
        self.prices = prices;
        self
    }

    pub fn with_budget_cap_nanousd(mut self, cap: Option<u128>) -> Self {
        self.budget_cap_nanousd = cap;
        self
    }

    pub fn provider_id(&self) -> String {
        self.provider.id()
    }

    pub fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn check_budget(&self) -> Result<(), GatewayError> {
        if let Some(cap) = self.budget_cap_nanousd {
            let spent = self.ledger.total_nanousd();
            if spent >= cap {
                return Err(GatewayError::BudgetExceeded {
                    spent_nanousd: spent,
                    cap_nanousd: cap,
                });
            }
        }
        Ok(())
    }

    fn call_with_retry<T>(
        &self,
        mut call: impl FnMut() -> Result<T, ProviderError>,
    ) -> Result<T, GatewayError> {
        let mut last_error = String::new();
        for attempt in 0..self.retry.max_attempts {
            if attempt > 0 {
                std::thread::sleep(self.retry.delay_for(attempt - 1));
            }
            let _permit = self.limiter.acquire();
            match call() {
                Ok(out) => return Ok(out),
                Err(ProviderError::Transient(msg)) => last_error = msg,
                Err(ProviderError::Fatal(msg)) => {
                    return Err(GatewayError::ProviderUnavailable {
                        attempts: attempt + 1,
                        last_error: msg,
                    })
                }
            }
        }
        Err(GatewayError::ProviderUnavailable {
            attempts: self.retry.max_attempts,
            last_error,
        })
    }

    /// Issue one generation call: validate, budget-check, rate-limit, retry
    /// transients, then record the spend.
    pub fn complete(&self, request: &GenerationRequest) -> Result<GenerationResponse, GatewayError> {
        request.validate()?;
        self.check_budget()?;
        let out = self.call_with_retry(|| self.provider.complete(request))?;
        self.ledger
            .record(request.agent_role, out.input_tokens, out.output_tokens, self.prices);
        Ok(GenerationResponse {
            text: out.text,
            input_tokens: out.input_tokens,
            output_tokens: out.output_tokens,
            provider_id: self.provider.id(),
        })
    }

    /// Generate, extract the schema-hinted JSON, and on a schema violation
    /// re-prompt once with the violation list appended. Errors after the
    /// single repair round; keys are never guessed or filled in locally.
    pub fn complete_json_with_repair(
        &self,
        request: &GenerationRequest,
        schema: SchemaId,
    ) -> Result<Value, GatewayError> {
        let response = self.complete(request)?;
        let first = match extract_json(&response.text, schema) {
            Ok(value) => return Ok(value),
            Err(err @ (GatewayError::SchemaViolation { .. } | GatewayError::NoJsonFound)) => err,
            Err(other) => return Err(other),
        };

        let complaint = match &first {
            GatewayError::SchemaViolation { violations, .. } => violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n- "),
            _ => "no JSON value was found in your reply".to_string(),
        };
        let mut repair = request.clone();
        repair.user_prompt = format!(
            "{}\n\nYour previous reply was rejected for these problems:\n- {}\n\nReply again with only the corrected JSON.",
            request.user_prompt, complaint
        );
        let response = self.complete(&repair)?;
        extract_json(&response.text, schema)
    }

    /// Embed text through the provider, with the same rate-limit / retry /
    /// budget path as generation. Embedding calls bill input tokens only.
    pub fn embed_text(&self, text: &str) -> Result<EmbeddingVector, GatewayError> {
        self.check_budget()?;
        let values = self.call_with_retry(|| self.provider.embed(text))?;
        self.ledger
            .record(AgentRole::Embedding, approx_tokens(text), 0, self.prices);
        Ok(EmbeddingVector {
            values,
            provider_id: self.provider.id(),
        })
    }
}

impl Embedder for Gateway {
    fn embed(&self, text: &str) -> Result<EmbeddingVector, GatewayError> {
        self.embed_text(text)
    }
}

/// Crude token estimate (~4 chars per token) used where the backend does not
/// report usage.
pub fn approx_tokens(text: &str) -> u64 {
    (text.chars().count() as u64 / 4).max(1)
}

#[cfg(test)]
mod tests {
    use super::testing::{ConcurrencyProbe, FailingProvider};
    use super::*;
    use std::time::Duration;

    fn fast_retry() -> RetryPolicy {
        RetryPolicy {
            max_attempts: 3,
            base_delay: Duration::from_millis(1),
            multiplier: 2,
        }
    }

    #[test]
    fn empty_user_prompt_is_invalid() {
        let gw = Gateway::new(Arc::new(mock::MockProvider::new(7)));
        let req = GenerationRequest::new(AgentRole::Other, "system", "");
        assert!(matches!(gw.complete(&req), Err(GatewayError::InvalidRequest(_))));
    }

    #[test]
    fn mock_is_deterministic_across_runs() {
        let run = || {
            let gw = Gateway::new(Arc::new(mock::MockProvider::new(7)));
            gw.complete(&GenerationRequest::new(AgentRole::Other, "system", "ping"))
                .unwrap()
                .text
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn different_seeds_change_mock_output() {
        let text = |seed| {
            let gw = Gateway::new(Arc::new(mock::MockProvider::new(seed)));
            gw.complete(&GenerationRequest::new(AgentRole::Other, "system", "ping"))
                .unwrap()
                .text
        };
        assert_ne!(text(7), text(8));
    }

    #[test]
    fn transient_failures_are_retried_then_surface() {
        let gw = Gateway::new(Arc::new(FailingProvider::transient(2)))
            .with_retry(fast_retry());
        let req = GenerationRequest::new(AgentRole::Other, "s", "u");
        // two transient failures, third attempt succeeds
        assert!(gw.complete(&req).is_ok());

        let gw = Gateway::new(Arc::new(FailingProvider::transient(10)))
            .with_retry(fast_retry());
        match gw.complete(&req) {
            Err(GatewayError::ProviderUnavailable { attempts, .. }) => assert_eq!(attempts, 3),
            other => panic!("expected ProviderUnavailable, got {other:?}"),
        }
    }

    #[test]
    fn fatal_failures_do_not_retry() {
        let provider = Arc::new(FailingProvider::fatal());
        let gw = Gateway::new(provider.clone()).with_retry(fast_retry());
        let req = GenerationRequest::new(AgentRole::Other, "s", "u");
        assert!(gw.complete(&req).is_err());
        assert_eq!(provider.calls(), 1);
    }

    #[test]
    fn budget_cap_zero_blocks_first_call() {
        let gw = Gateway::new(Arc::new(mock::MockProvider::new(1)))
            .with_budget_cap_nanousd(Some(0));
        let req = GenerationRequest::new(AgentRole::Other, "s", "u");
        assert!(matches!(gw.complete(&req), Err(GatewayError::BudgetExceeded { .. })));
        assert_eq!(gw.ledger().len(), 0);
    }

    #[test]
    fn concurrency_cap_is_never_exceeded() {
        let probe = Arc::new(ConcurrencyProbe::new(Duration::from_millis(2)));
        let gw = Gateway::new(probe.clone()).with_concurrency(3);
        std::thread::scope(|scope| {
            for i in 0..16 {
                let gw = gw.clone();
                scope.spawn(move || {
                    let req = GenerationRequest::new(AgentRole::Other, "s", format!("call {i}"));
                    gw.complete(&req).unwrap();
                });
            }
        });
        assert_eq!(probe.calls(), 16);
        assert!(
            probe.max_in_flight() <= 3,
            "observed {} concurrent calls with cap 3",
            probe.max_in_flight()
        );
    }

    #[test]
    fn ledger_totals_match_recorded_sum() {
        let gw = Gateway::new(Arc::new(mock::MockProvider::new(3)))
            .with_prices(PriceTable::from_usd_per_million(2.5, 10.0));
        for i in 0..10 {
            gw.complete(&GenerationRequest::new(AgentRole::Other, "s", format!("p{i}")))
                .unwrap();
        }
        let sum: u128 = gw.ledger().records().iter().map(|r| r.cost_nanousd).sum();
        assert_eq!(gw.ledger().total_nanousd(), sum);
    }
}
