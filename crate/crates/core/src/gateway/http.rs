//! Chat-completions HTTP backend (OpenAI-compatible request shape).
//!
//! The gateway owns retry/backoff, so this layer only classifies failures:
//! 429 and 5xx are transient, other HTTP errors are fatal.

use super::{GenerationRequest, Provider, ProviderError, ProviderOutput};
use serde::Deserialize;
use serde_json::{json, Value};
use std::time::Duration;

pub struct HttpProvider {
    endpoint: String,
    api_key: String,
    model: String,
    embedding_model: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    pub fn new(endpoint: String, api_key: String, model: String, embedding_model: Option<String>) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .expect("reqwest client");
        Self {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            api_key,
            model,
            embedding_model,
            client,
        }
    }

    fn post(&self, path: &str, body: &Value) -> Result<Value, ProviderError> {
        let url = format!("{}{path}", self.endpoint);
        let mut req = self.client.post(&url).json(body);
        if !self.api_key.is_empty() {
            req = req.bearer_auth(&self.api_key);
        }
        let response = req
            .send()
            .map_err(|e| ProviderError::Transient(format!("request to {url} failed: {e}")))?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| ProviderError::Transient(format!("reading response body: {e}")))?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(ProviderError::Transient(format!("{url} returned {status}: {text}")));
        }
        if !status.is_success() {
            return Err(ProviderError::Fatal(format!("{url} returned {status}: {text}")));
        }
        serde_json::from_str(&text)
            .map_err(|e| ProviderError::Fatal(format!("non-JSON response from {url}: {e}")))
    }
}

pub fn completion_body(model: &str, request: &GenerationRequest) -> Value {
    json!({
        "model": model,
        "messages": [
            {"role": "system", "content": request.system_prompt},
            {"role": "user", "content": request.user_prompt},
        ],
        "temperature": request.temperature,
        "max_tokens": request.max_output_tokens,
    })
}

#[derive(Deserialize)]
struct Usage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
}

pub fn parse_completion(value: &Value) -> Result<ProviderOutput, ProviderError> {
    let text = value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| ProviderError::Fatal("response lacks choices[0].message.content".into()))?
        .to_string();
    let usage: Usage = value
        .get("usage")
        .cloned()
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| ProviderError::Fatal(format!("malformed usage block: {e}")))?
        .unwrap_or(Usage {
            prompt_tokens: 0,
            completion_tokens: 0,
        });
    Ok(ProviderOutput {
        text,
        input_tokens: usage.prompt_tokens,
        output_tokens: usage.completion_tokens,
    })
}

pub fn parse_embedding(value: &Value) -> Result<Vec<f32>, ProviderError> {
    let arr = value
        .pointer("/data/0/embedding")
        .and_then(Value::as_array)
        .ok_or_else(|| ProviderError::Fatal("response lacks data[0].embedding".into()))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .map(|f| f as f32)
                .ok_or_else(|| ProviderError::Fatal("non-numeric embedding entry".into()))
        })
        .collect()
}

impl Provider for HttpProvider {
    fn id(&self) -> String {
        format!("openai_compat/{}", self.model)
    }

    fn complete(&self, request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        let body = completion_body(&self.model, request);
        let value = self.post("/chat/completions", &body)?;
        parse_completion(&value)
    }

    fn embed(&self, text: &str) -> Result<Vec<f32>, ProviderError> {
        let model = self.embedding_model.as_deref().unwrap_or(&self.model);
        let body = json!({ "model": model, "input": text });
        let value = self.post("/embeddings", &body)?;
        parse_embedding(&value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::ledger::AgentRole;

    #[test]
    fn completion_body_carries_both_prompts() {
        let req = GenerationRequest::new(AgentRole::Persona, "sys", "user text");
        let body = completion_body("gpt-test", &req);
        assert_eq!(body["messages"][0]["content"], "sys");
        assert_eq!(body["messages"][1]["content"], "user text");
        assert_eq!(body["temperature"], 0.9);
    }

    #[test]
    fn parses_completion_and_usage() {
        let value = json!({
            "choices": [{"message": {"content": "hello"}}],
            "usage": {"prompt_tokens": 12, "completion_tokens": 3}
        });
        let out = parse_completion(&value).unwrap();
        assert_eq!(out.text, "hello");
        assert_eq!(out.input_tokens, 12);
        assert_eq!(out.output_tokens, 3);
    }

    #[test]
    fn parses_embedding_vector() {
        let value = json!({"data": [{"embedding": [0.25, -0.5]}]});
        assert_eq!(parse_embedding(&value).unwrap(), vec![0.25, -0.5]);
    }
}
