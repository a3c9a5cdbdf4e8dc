//! Pull the first schema-valid JSON value out of raw model output.
//!
//! Models wrap JSON in code fences, prefix it with chatter, or append
//! trailing prose. Recovery here is deliberately limited to locating a
//! well-formed value; nothing rewrites broken JSON (a malformed payload is a
//! prompt defect the caller handles with one regeneration round).

use super::schema::{self, SchemaId, Violation};
use super::GatewayError;
use serde_json::Value;

/// Return the first JSON value in `raw` that validates against `schema`.
///
/// Candidates are taken in order: fenced ```...``` blocks first, then every
/// `{`/`[` start position in the full text. If values parse but none
/// validates, the violations of the first parsed candidate are returned.
pub fn extract_json(raw: &str, schema: SchemaId) -> Result<Value, GatewayError> {
    let mut first_failure: Option<Vec<Violation>> = None;

    for candidate in candidate_values(raw) {
        let violations = schema::validate(schema, &candidate);
        if violations.is_empty() {
            return Ok(candidate);
        }
        first_failure.get_or_insert(violations);
    }

    match first_failure {
        Some(violations) => Err(GatewayError::SchemaViolation { schema, violations }),
        None => Err(GatewayError::NoJsonFound),
    }
}

/// First JSON array anywhere in `raw`, without schema validation. Callers
/// that tolerate partially-valid lists (seed-event brainstorms, expansions)
/// use this and then vet items one by one.
pub fn first_json_array(raw: &str) -> Option<Vec<Value>> {
    candidate_values(raw).into_iter().find_map(|v| match v {
        Value::Array(items) => Some(items),
        _ => None,
    })
}

fn candidate_values(raw: &str) -> Vec<Value> {
    let mut out = Vec::new();
    for block in fenced_blocks(raw) {
        scan_values(block, &mut out);
    }
    scan_values(raw, &mut out);
    out
}

/// Contents of every ``` fenced block, language tag stripped.
fn fenced_blocks(raw: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut rest = raw;
    while let Some(open) = rest.find("```") {
        let after_open = &rest[open + 3..];
        let Some(close) = after_open.find("```") else { break };
        let mut body = &after_open[..close];
        // drop a language tag such as `json` on the opening line
        if let Some(nl) = body.find('\n') {
            let tag = body[..nl].trim();
            if !tag.is_empty() && tag.chars().all(|c| c.is_ascii_alphanumeric()) {
                body = &body[nl + 1..];
            }
        }
        blocks.push(body.trim());
        rest = &after_open[close + 3..];
    }
    blocks
}

/// Parse one JSON value from each `{` / `[` start position that yields one.
fn scan_values(text: &str, out: &mut Vec<Value>) {
    for (pos, ch) in text.char_indices() {
        if ch != '{' && ch != '[' {
            continue;
        }
        let mut stream = serde_json::Deserializer::from_str(&text[pos..]).into_iter::<Value>();
        if let Some(Ok(value)) = stream.next() {
            out.push(value);
        }
    }
}
