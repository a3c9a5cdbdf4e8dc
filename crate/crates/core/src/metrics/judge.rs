//! Rubric-driven scoring of generated emails by a language model: tone,
//! fluency, coherence, informativeness, engagement, each on a 1-5 scale,
//! plus an overall verdict.

use crate::gateway::schema::SchemaId;
use crate::gateway::{AgentRole, Gateway, GatewayError, GenerationRequest};
use crate::prompts;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisScore {
    pub score: f64,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverallScore {
    pub score: f64,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeScores {
    pub tone: AxisScore,
    pub fluency: AxisScore,
    pub coherence: AxisScore,
    pub informativeness: AxisScore,
    pub engagement: AxisScore,
    pub overall: OverallScore,
}

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("judge output unparseable after repair: {0}")]
    JudgeParseFailed(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

fn axis(value: &Value, key: &str, text_key: &str) -> Result<(f64, String), String> {
    let entry = value.get(key).ok_or_else(|| format!("missing {key}"))?;
    let score = entry
        .get("score")
        .and_then(Value::as_f64)
        .ok_or_else(|| format!("missing {key}.score"))?;
    let text = entry
        .get(text_key)
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    Ok((score, text))
}

/// Parse the documented judge output shape (capitalized dimension keys).
pub fn parse_judge_scores(value: &Value) -> Result<JudgeScores, String> {
    let mut out = Vec::new();
    for key in ["Tone", "Fluency", "Coherence", "Informativeness", "Engagement"] {
        let (score, explanation) = axis(value, key, "explanation")?;
        out.push(AxisScore { score, explanation });
    }
    let (score, summary) = axis(value, "Overall", "summary")?;
    let mut it = out.into_iter();
    Ok(JudgeScores {
        tone: it.next().unwrap(),
        fluency: it.next().unwrap(),
        coherence: it.next().unwrap(),
        informativeness: it.next().unwrap(),
        engagement: it.next().unwrap(),
        overall: OverallScore { score, summary },
    })
}

/// Render the rubric prompt for one email, parse the JSON reply, validate
/// the 1-5 ranges. One repair round, then `JudgeParseFailed`.
pub fn llm_judge(gateway: &Gateway, email: &str) -> Result<JudgeScores, JudgeError> {
    let (system, user) = prompts::render_judge_prompt(email);
    let request =
        GenerationRequest::new(AgentRole::Judge, system, user).with_schema(SchemaId::JudgeScores);
    let value = gateway
        .complete_json_with_repair(&request, SchemaId::JudgeScores)
        .map_err(|e| match e {
            GatewayError::SchemaViolation { .. } | GatewayError::NoJsonFound => {
                JudgeError::JudgeParseFailed(e.to_string())
            }
            other => JudgeError::Gateway(other),
        })?;
    parse_judge_scores(&value).map_err(JudgeError::JudgeParseFailed)
}

/// Mean of per-email judge scores across a corpus sample.
pub fn judge_corpus(gateway: &Gateway, emails: &[String]) -> Result<JudgeScores, JudgeError> {
    assert!(!emails.is_empty(), "judge needs at least one email");
    let mut sums = [0.0f64; 6];
    for email in emails {
        let s = llm_judge(gateway, email)?;
        for (slot, value) in sums.iter_mut().zip([
            s.tone.score,
            s.fluency.score,
            s.coherence.score,
            s.informativeness.score,
            s.engagement.score,
            s.overall.score,
        ]) {
            *slot += value;
        }
    }
    let n = emails.len() as f64;
    let mean = |i: usize| AxisScore {
        score: sums[i] / n,
        explanation: String::new(),
    };
    Ok(JudgeScores {
        tone: mean(0),
        fluency: mean(1),
        coherence: mean(2),
        informativeness: mean(3),
        engagement: mean(4),
        overall: OverallScore {
            score: sums[5] / n,
            summary: format!("mean over {} emails", emails.len()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::mock::MockProvider;
    use crate::gateway::testing::{FixedProvider, RoutedProvider};
    use crate::gateway::Provider;
    use std::sync::Arc;

    /// The rubric prompt's worked example output.
    const EXAMPLE_PAYLOAD: &str = r#"{
        "Tone": {"score": 4, "explanation": "Tone is polite and suitable for a business email, but slightly too formal for the intended young audience."},
        "Fluency": {"score": 5, "explanation": "Grammar and flow are flawless; very natural phrasing."},
        "Coherence": {"score": 4, "explanation": "Message is generally easy to follow, though one sentence feels abrupt."},
        "Informativeness": {"score": 5, "explanation": "All key details are included and accurate."},
        "Engagement": {"score": 3, "explanation": "The message provides information but lacks a strong hook to engage the reader."},
        "Overall": {"score": 4.2, "summary": "Well-written and informative, but slightly formal and could be more engaging."}
    }"#;

    #[test]
    fn documented_example_payload_parses() {
        let value: Value = serde_json::from_str(EXAMPLE_PAYLOAD).unwrap();
        let scores = parse_judge_scores(&value).unwrap();
        assert_eq!(scores.tone.score, 4.0);
        assert_eq!(scores.fluency.score, 5.0);
        assert_eq!(scores.coherence.score, 4.0);
        assert_eq!(scores.informativeness.score, 5.0);
        assert_eq!(scores.engagement.score, 3.0);
        assert_eq!(scores.overall.score, 4.2);
    }

    #[test]
    fn all_fives_backend_scores_all_fives() {
        let all_fives = r#"{
            "Tone": {"score": 5, "explanation": "x"},
            "Fluency": {"score": 5, "explanation": "x"},
            "Coherence": {"score": 5, "explanation": "x"},
            "Informativeness": {"score": 5, "explanation": "x"},
            "Engagement": {"score": 5, "explanation": "x"},
            "Overall": {"score": 5, "summary": "x"}
        }"#;
        let gateway = crate::gateway::Gateway::new(Arc::new(FixedProvider::new(all_fives)));
        let scores = llm_judge(&gateway, "dear team, the report is attached").unwrap();
        assert_eq!(scores.overall.score, 5.0);
        assert_eq!(scores.tone.score, 5.0);
    }

    #[test]
    fn out_of_range_score_fails_after_repair() {
        let too_high = EXAMPLE_PAYLOAD.replacen("\"score\": 4,", "\"score\": 7,", 1);
        let gateway = crate::gateway::Gateway::new(Arc::new(FixedProvider::new(too_high)));
        let err = llm_judge(&gateway, "hello").unwrap_err();
        match err {
            JudgeError::JudgeParseFailed(msg) => assert!(msg.contains("1-5")),
            other => panic!("expected JudgeParseFailed, got {other:?}"),
        }
        assert_eq!(gateway.ledger().len(), 2, "one attempt plus one repair");
    }

    #[test]
    fn mock_judge_scores_stay_in_range() {
        let gateway = crate::gateway::Gateway::new(Arc::new(MockProvider::new(3)));
        let scores = llm_judge(&gateway, "quarterly results attached; see the summary below").unwrap();
        for s in [
            scores.tone.score,
            scores.fluency.score,
            scores.coherence.score,
            scores.informativeness.score,
            scores.engagement.score,
            scores.overall.score,
        ] {
            assert!((1.0..=5.0).contains(&s));
        }
    }

    #[test]
    fn corpus_mean_averages_across_emails() {
        // alternate 4s and 5s on overall by routing per-email
        let provider = RoutedProvider::new(|req: &GenerationRequest| {
            let score = if req.user_prompt.contains("first email") { 4 } else { 5 };
            format!(
                r#"{{"Tone": {{"score": {score}, "explanation": "x"}},
                     "Fluency": {{"score": {score}, "explanation": "x"}},
                     "Coherence": {{"score": {score}, "explanation": "x"}},
                     "Informativeness": {{"score": {score}, "explanation": "x"}},
                     "Engagement": {{"score": {score}, "explanation": "x"}},
                     "Overall": {{"score": {score}, "summary": "x"}}}}"#
            )
        });
        let _ = provider.id();
        let gateway = crate::gateway::Gateway::new(Arc::new(provider));
        let scores =
            judge_corpus(&gateway, &["first email".into(), "second email".into()]).unwrap();
        assert!((scores.overall.score - 4.5).abs() < 1e-12);
    }
}
