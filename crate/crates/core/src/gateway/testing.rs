//! Instrumented and scripted providers for tests.
//!
//! These live in the library (not `#[cfg(test)]`) because integration tests
//! and the acceptance suite drive the pipeline through them: scripted critic
//! sequences, fault injection, concurrency probes.

use super::mock::{hashed_bow_embedding, MockProvider};
use super::{GenerationRequest, Provider, ProviderError, ProviderOutput, SchemaId};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

/// Fails the first `n` calls with a transient (or fatal) error, then succeeds.
pub struct FailingProvider {
    remaining: AtomicUsize,
    fatal: bool,
    calls: AtomicUsize,
}

impl FailingProvider {
    pub fn transient(n: usize) -> Self {
        Self {
            remaining: AtomicUsize::new(n),
            fatal: false,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn fatal() -> Self {
        Self {
            remaining: AtomicUsize::new(usize::MAX),
            fatal: true,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn step(&self) -> Result<(), ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        let before = self
            .remaining
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |v| v.checked_sub(1))
            .unwrap_or(0);
        if before == 0 {
            return Ok(());
        }
        if self.fatal {
            Err(ProviderError::Fatal("injected fatal failure".into()))
        } else {
            Err(ProviderError::Transient("injected transient failure".into()))
        }
    }
}

impl Provider for FailingProvider {
    fn id(&self) -> String {
        "testing/failing".into()
    }

    fn complete(&self, _request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        self.step()?;
        Ok(ProviderOutput {
            text: "ok".into(),
            input_tokens: 1,
            output_tokens: 1,
        })
    }

    fn embed(&self, _text: &str) -> Result<Vec<f32>, ProviderError> {
        self.step()?;
        Ok(vec![1.0, 0.0])
    }
}

/// Tracks the maximum number of calls in flight at once.
pub struct ConcurrencyProbe {
    in_flight: AtomicUsize,
    max_in_flight: AtomicUsize,
    calls: AtomicUsize,
    hold: Duration,
}

impl ConcurrencyProbe {
    pub fn new(hold: Duration) -> Self {
        Self {
            in_flight: AtomicUsize::new(0),
            max_in_flight: AtomicUsize::new(0),
            calls: AtomicUsize::new(0),
            hold,
        }
    }

    pub fn max_in_flight(&self) -> usize {
        self.max_in_flight.load(Ordering::SeqCst)
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Provider for ConcurrencyProbe {
    fn id(&self) -> String {
        "testing/concurrency-probe".into()
    }

    fn complete(&self, _request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        let now = self.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        self.max_in_flight.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(self.hold);
        self.in_flight.fetch_sub(1, Ordering::SeqCst);
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(ProviderOutput {
            text: "ok".into(),
            input_tokens: 1,
            output_tokens: 1,
        })
    }

    fn embed(&self, _text: &str) -> Result<Vec<f32>, ProviderError> {
        Ok(vec![1.0, 0.0])
    }
}

/// Plays back canned responses for chosen schemas, in order, falling back to
/// the deterministic mock when a schema has no script (or its script ran
/// out). Scripts drive the refinement-loop tests: e.g. critic verdicts
/// revise, revise, approve.
pub struct ScriptedProvider {
    inner: MockProvider,
    scripts: Mutex<Vec<(Option<SchemaId>, Vec<String>)>>,
    calls: AtomicUsize,
}

impl ScriptedProvider {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: MockProvider::new(seed),
            scripts: Mutex::new(Vec::new()),
            calls: AtomicUsize::new(0),
        }
    }

    /// Queue responses returned (in order) for requests hinting `schema`.
    pub fn script(self, schema: Option<SchemaId>, responses: Vec<String>) -> Self {
        self.scripts.lock().unwrap().push((schema, responses));
        self
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    fn next_scripted(&self, schema: Option<SchemaId>) -> Option<String> {
        let mut scripts = self.scripts.lock().unwrap();
        for (s, responses) in scripts.iter_mut() {
            if *s == schema && !responses.is_empty() {
                return Some(responses.remove(0));
            }
        }
        None
    }
}

impl Provider for ScriptedProvider {
    fn id(&self) -> String {
        "testing/scripted".into()
    }

    fn complete(&self, request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if let Some(text) = self.next_scripted(request.schema_hint) {
            let output_tokens = super::approx_tokens(&text);
            return Ok(ProviderOutput {
                text,
                input_tokens: super::approx_tokens(&request.user_prompt),
                output_tokens,
            });
        }
        self.inner.complete(request)
    }

    fn embed(&self, text: &str) -> Result<Vec<f32>, ProviderError> {
        self.inner.embed(text)
    }
}

/// Reports a fixed token usage on every call; drives cost-model tests with
/// known arithmetic.
pub struct UsageProvider {
    input_tokens: u64,
    output_tokens: u64,
}

impl UsageProvider {
    pub fn new(input_tokens: u64, output_tokens: u64) -> Self {
        Self {
            input_tokens,
            output_tokens,
        }
    }
}

impl Provider for UsageProvider {
    fn id(&self) -> String {
        "testing/usage".into()
    }

    fn complete(&self, _request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        Ok(ProviderOutput {
            text: "ok".into(),
            input_tokens: self.input_tokens,
            output_tokens: self.output_tokens,
        })
    }

    fn embed(&self, _text: &str) -> Result<Vec<f32>, ProviderError> {
        Ok(vec![1.0, 0.0])
    }
}

/// Responds to every completion with one fixed string; embeddings fall back
/// to hashed bag-of-words. Useful for enum-violation and fallback tests.
pub struct FixedProvider {
    text: String,
    dim: usize,
}

impl FixedProvider {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            dim: 64,
        }
    }
}

impl Provider for FixedProvider {
    fn id(&self) -> String {
        "testing/fixed".into()
    }

    fn complete(&self, request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        Ok(ProviderOutput {
            text: self.text.clone(),
            input_tokens: super::approx_tokens(&request.user_prompt),
            output_tokens: super::approx_tokens(&self.text),
        })
    }

    fn embed(&self, text: &str) -> Result<Vec<f32>, ProviderError> {
        Ok(hashed_bow_embedding(text, self.dim))
    }
}

/// Routes completions through a caller-supplied function of the user prompt.
/// The workhorse for echo / keyword-routing fixtures.
pub struct RoutedProvider<F>
where
    F: Fn(&GenerationRequest) -> String + Send + Sync,
{
    route: F,
    dim: usize,
}

impl<F> RoutedProvider<F>
where
    F: Fn(&GenerationRequest) -> String + Send + Sync,
{
    pub fn new(route: F) -> Self {
        Self { route, dim: 64 }
    }
}

impl<F> Provider for RoutedProvider<F>
where
    F: Fn(&GenerationRequest) -> String + Send + Sync,
{
    fn id(&self) -> String {
        "testing/routed".into()
    }

    fn complete(&self, request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        let text = (self.route)(request);
        Ok(ProviderOutput {
            input_tokens: super::approx_tokens(&request.user_prompt),
            output_tokens: super::approx_tokens(&text),
            text,
        })
    }

    fn embed(&self, text: &str) -> Result<Vec<f32>, ProviderError> {
        Ok(hashed_bow_embedding(text, self.dim))
    }
}
