//! Demographic prior loading and persona-seed sampling (stage 1 entry point).
//!
//! The prior is a set of independent categorical marginals (age bracket,
//! gender, ethnicity, income bracket, locale, family setup, nationality by
//! default, but any named marginals are accepted). The repository ships an
//! illustrative example prior; it is hand-written to look plausible, not an
//! official tabulation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;
use thiserror::Error;

const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Marginal {
    pub name: String,
    /// (category label, probability), preserved in file order.
    pub categories: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemographicPrior {
    marginals: Vec<Marginal>,
}

/// One sampled category per marginal, plus the seed that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemographicDraw {
    pub attributes: Vec<(String, String)>,
    pub rng_seed: u64,
}

impl DemographicDraw {
    pub fn get(&self, marginal: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(name, _)| name == marginal)
            .map(|(_, category)| category.as_str())
    }

    /// Render as the input object for the profile-generation prompt.
    pub fn to_prompt_input(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (name, category) in &self.attributes {
            m.insert(name.clone(), Value::String(category.clone()));
        }
        Value::Object(m)
    }
}

#[derive(Debug, Error)]
pub enum DemographicsError {
    #[error("cannot read prior {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse prior: {0}")]
    Parse(String),
    #[error("marginal \"{marginal}\" is empty")]
    EmptyMarginal { marginal: String },
    #[error("marginal \"{marginal}\" probabilities sum to {sum}, not 1")]
    Normalization { marginal: String, sum: f64 },
    #[error("marginal \"{marginal}\" has a negative probability for \"{category}\"")]
    NegativeProbability { marginal: String, category: String },
}

impl DemographicPrior {
    pub fn from_marginals(marginals: Vec<Marginal>) -> Result<Self, DemographicsError> {
        let prior = Self { marginals };
        prior.validate()?;
        Ok(prior)
    }

    /// Parse the `{"marginals": {"age": [["18-24", 0.12], ...], ...}}` format.
    pub fn from_json(raw: &str) -> Result<Self, DemographicsError> {
        let value: Value =
            serde_json::from_str(raw).map_err(|e| DemographicsError::Parse(e.to_string()))?;
        let map = value
            .get("marginals")
            .and_then(Value::as_object)
            .ok_or_else(|| DemographicsError::Parse("missing \"marginals\" object".into()))?;
        let mut marginals = Vec::with_capacity(map.len());
        for (name, entries) in map {
            let arr = entries.as_array().ok_or_else(|| {
                DemographicsError::Parse(format!("marginal \"{name}\" must be a list of [label, probability] pairs"))
            })?;
            let mut categories = Vec::with_capacity(arr.len());
            for entry in arr {
                let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    DemographicsError::Parse(format!("marginal \"{name}\" entries must be [label, probability] pairs"))
                })?;
                let label = pair[0]
                    .as_str()
                    .ok_or_else(|| DemographicsError::Parse(format!("marginal \"{name}\" has a non-string label")))?;
                let p = pair[1]
                    .as_f64()
                    .ok_or_else(|| DemographicsError::Parse(format!("marginal \"{name}\" has a non-numeric probability")))?;
                categories.push((label.to_string(), p));
            }
            marginals.push(Marginal {
                name: name.clone(),
                categories,
            });
        }
        Self::from_marginals(marginals)
    }

    fn validate(&self) -> Result<(), DemographicsError> {
        for marginal in &self.marginals {
            if marginal.categories.is_empty() {
                return Err(DemographicsError::EmptyMarginal {
                    marginal: marginal.name.clone(),
                });
            }
            for (category, p) in &marginal.categories {
                if *p < 0.0 || !p.is_finite() {
                    return Err(DemographicsError::NegativeProbability {
                        marginal: marginal.name.clone(),
                        category: category.clone(),
                    });
                }
            }
            let sum: f64 = marginal.categories.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(DemographicsError::Normalization {
                    marginal: marginal.name.clone(),
                    sum,
                });
            }
        }
        Ok(())
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }
}

pub fn load_prior(path: &Path) -> Result<DemographicPrior, DemographicsError> {
    let raw = std::fs::read_to_string(path).map_err(|source| DemographicsError::Io {
        path: path.display().to_string(),
        source,
    })?;
    DemographicPrior::from_json(&raw)
}

/// Sample one category per marginal, independently, from a seeded stream.
/// The same seed always yields the same draw.
pub fn sample_draw(prior: &DemographicPrior, seed: u64) -> DemographicDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attributes = prior
        .marginals
        .iter()
        .map(|marginal| {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = &marginal.categories[marginal.categories.len() - 1].0;
            for (category, p) in &marginal.categories {
                acc += p;
                if u < acc {
                    chosen = category;
                    break;
                }
            }
            (marginal.name.clone(), chosen.clone())
        })
        .collect();
    DemographicDraw {
        attributes,
        rng_seed: seed,
    }
}
