//! Provider configuration file format.
//!
//! Credentials are referenced by environment variable name only; keys never
//! appear inline in config files.

use super::http::HttpProvider;
use super::ledger::{PriceTable, NANO_PER_USD};
use super::mock::MockProvider;
use super::{Gateway, Provider, RetryPolicy};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    /// Deterministic offline backend.
    Mock,
    /// Chat-completions style HTTP API (OpenAI-compatible request shape).
    OpenaiCompat,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
pub struct PriceConfig {
    /// USD per million input tokens.
    #[serde(default)]
    pub input_usd_per_million: f64,
    /// USD per million output tokens.
    #[serde(default)]
    pub output_usd_per_million: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the API key.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub embedding_model: Option<String>,
    #[serde(default)]
    pub prices: PriceConfig,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    /// Total spend cap in USD for one run; `null` disables the guard.
    #[serde(default)]
    pub budget_usd: Option<f64>,
    #[serde(default = "default_embedding_dim")]
    pub embedding_dim: usize,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
}

fn default_concurrency() -> usize {
    8
}

fn default_embedding_dim() -> usize {
    256
}

fn default_max_attempts() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    200
}

impl Default for ProviderConfig {
    fn default() -> Self {
        Self {
            kind: ProviderKind::Mock,
            endpoint: None,
            api_key_env: None,
            model: None,
            embedding_model: None,
            prices: PriceConfig::default(),
            concurrency: default_concurrency(),
            budget_usd: None,
            embedding_dim: default_embedding_dim(),
            max_attempts: default_max_attempts(),
            backoff_ms: default_backoff_ms(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read provider config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse provider config {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("provider config invalid: {0}")]
    Invalid(String),
}

impl ProviderConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let config: Self = serde_json::from_str(&raw).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.concurrency == 0 {
            return Err(ConfigError::Invalid("concurrency must be positive".into()));
        }
        if let Some(b) = self.budget_usd {
            if b < 0.0 || !b.is_finite() {
                return Err(ConfigError::Invalid("budget_usd must be finite and >= 0".into()));
            }
        }
        if self.kind == ProviderKind::OpenaiCompat {
            if self.endpoint.is_none() {
                return Err(ConfigError::Invalid("openai_compat requires an endpoint".into()));
            }
            if self.model.is_none() {
                return Err(ConfigError::Invalid("openai_compat requires a model name".into()));
            }
        }
        Ok(())
    }

    pub fn budget_cap_nanousd(&self) -> Option<u128> {
        self.budget_usd.map(|usd| (usd * NANO_PER_USD as f64).round() as u128)
    }

    /// Build a gateway for this config. `seed` drives the mock backend and is
    /// ignored by remote providers.
    pub fn build_gateway(&self, seed: u64) -> Result<Gateway, ConfigError> {
        self.validate()?;
        let provider: Arc<dyn Provider> = match self.kind {
            ProviderKind::Mock => {
                Arc::new(MockProvider::new(seed).with_embedding_dim(self.embedding_dim))
            }
            ProviderKind::OpenaiCompat => {
                let endpoint = self.endpoint.clone().expect("validated");
                let model = self.model.clone().expect("validated");
                let api_key = match &self.api_key_env {
                    Some(var) => std::env::var(var).map_err(|_| {
                        ConfigError::Invalid(format!("environment variable {var} is not set"))
                    })?,
                    None => String::new(),
                };
                Arc::new(HttpProvider::new(
                    endpoint,
                    api_key,
                    model,
                    self.embedding_model.clone(),
                ))
            }
        };
        Ok(Gateway::new(provider)
            .with_concurrency(self.concurrency)
            .with_retry(RetryPolicy {
                max_attempts: self.max_attempts.max(1),
                base_delay: Duration::from_millis(self.backoff_ms),
                multiplier: 2,
            })
            .with_prices(PriceTable::from_usd_per_million(
                self.prices.input_usd_per_million,
                self.prices.output_usd_per_million,
            ))
            .with_budget_cap_nanousd(self.budget_cap_nanousd()))
    }
}
