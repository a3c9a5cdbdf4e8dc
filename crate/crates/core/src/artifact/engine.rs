//! Stage 3: outline → generate → three critics → revise, looping to a
//! budget, for each event in the forest.

use super::{Artifact, ArtifactKind, ArtifactPayload, Direction};
use crate::event_forest::{ExpandedEvent, NodeId};
use crate::gateway::schema::SchemaId;
use crate::gateway::{AgentRole, Gateway, GatewayError, GenerationRequest};
use crate::persona::PersonaProfile;
use crate::prompts;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Hard ceiling on generator–critic cycles; the cost model prices at most 5.
pub const MAX_CYCLES_CEILING: u32 = 5;
pub const DEFAULT_MAX_CYCLES: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CritiqueAxis {
    EventConsistency,
    PersonaConsistency,
    RealismFluency,
}

impl CritiqueAxis {
    pub const ALL: [CritiqueAxis; 3] = [
        CritiqueAxis::EventConsistency,
        CritiqueAxis::PersonaConsistency,
        CritiqueAxis::RealismFluency,
    ];

    fn focus(self) -> &'static str {
        match self {
            CritiqueAxis::EventConsistency => {
                "consistency with the event: every date, place, participant, and detail must match \
the event; flag any contradictions"
            }
            CritiqueAxis::PersonaConsistency => {
                "consistency with the persona: the content must align with the persona's known \
attributes, relationships, and voice; flag any contradictions"
            }
            CritiqueAxis::RealismFluency => {
                "realism and fluency: the artifact must read like a genuine record a real person \
would produce or receive; flag unnatural language"
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Approve,
    Revise,
}

/// One critic's structured verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Critique {
    pub axis: CritiqueAxis,
    pub verdict: Verdict,
    pub feedback: String,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("outline generation failed: {0}")]
    OutlineFailed(String),
    #[error("artifact generation failed: {0}")]
    GenerationFailed(String),
    #[error("artifact revision failed: {0}")]
    RevisionFailed(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outline(pub String);

/// Outcome of one refine loop.
#[derive(Debug, Clone)]
pub struct RefinedArtifact {
    pub artifact: Artifact,
    pub cycles_used: u32,
    pub approved: bool,
}

fn is_budget(err: &GatewayError) -> bool {
    matches!(err, GatewayError::BudgetExceeded { .. })
}

/// Ask which record the event would plausibly leave. Any parse failure falls
/// back to a received email; only budget exhaustion propagates.
pub fn choose_artifact_kind(
    gateway: &Gateway,
    event: &ExpandedEvent,
) -> Result<(ArtifactKind, Direction), GatewayError> {
    let event_value = prompts::event_to_value(event);
    let (system, user) = prompts::render_choice_prompt(&event_value);
    let request = GenerationRequest::new(AgentRole::ArtifactGenerator, system, user)
        .with_schema(SchemaId::ArtifactChoice);
    let fallback = (ArtifactKind::Email, Direction::Received);
    let value = match gateway.complete(&request) {
        Ok(response) => match crate::gateway::extract_json(&response.text, SchemaId::ArtifactChoice) {
            Ok(value) => value,
            Err(_) => return Ok(fallback),
        },
        Err(err) if is_budget(&err) => return Err(err),
        Err(_) => return Ok(fallback),
    };
    let kind = serde_json::from_value(value["kind"].clone());
    let direction = serde_json::from_value(value["direction"].clone());
    match (kind, direction) {
        (Ok(kind), Ok(direction)) => Ok((kind, direction)),
        _ => Ok(fallback),
    }
}

/// Produce the structured outline the generator writes from. One retry on
/// empty output, then `OutlineFailed`.
pub fn generate_outline(
    gateway: &Gateway,
    event: &ExpandedEvent,
    profile: &PersonaProfile,
    direction: Direction,
) -> Result<Outline, EngineError> {
    let event_value = prompts::event_to_value(event);
    let (system, user) = prompts::render_outline_prompt(&event_value, &profile.name, direction);
    let request = GenerationRequest::new(AgentRole::ArtifactGenerator, system, user);
    for attempt in 0..2 {
        let request = if attempt == 0 {
            request.clone()
        } else {
            let mut retry = request.clone();
            retry.user_prompt =
                format!("{}\n\nYour previous reply was empty. Write the outline now.", request.user_prompt);
            retry
        };
        let response = gateway.complete(&request)?;
        if !response.text.trim().is_empty() {
            return Ok(Outline(response.text));
        }
    }
    Err(EngineError::OutlineFailed("model returned empty outlines twice".into()))
}

/// Instantiate the artifact from the outline. Schema repairs once via the
/// gateway; a second violation is `GenerationFailed`.
pub fn generate_artifact(
    gateway: &Gateway,
    outline: &Outline,
    event: &ExpandedEvent,
    event_id: NodeId,
    profile: &PersonaProfile,
    kind: ArtifactKind,
    direction: Direction,
) -> Result<Artifact, EngineError> {
    let event_value = prompts::event_to_value(event);
    let digest = prompts::profile_digest(profile);
    let (system, user) = prompts::render_artifact_prompt(kind, &outline.0, &event_value, &digest);
    let request =
        GenerationRequest::new(AgentRole::ArtifactGenerator, system, user).with_schema(kind.schema());
    let value = gateway
        .complete_json_with_repair(&request, kind.schema())
        .map_err(|e| match e {
            GatewayError::SchemaViolation { .. } | GatewayError::NoJsonFound => {
                EngineError::GenerationFailed(e.to_string())
            }
            other => EngineError::Gateway(other),
        })?;
    let payload = ArtifactPayload::from_value(kind, value)
        .map_err(|e| EngineError::GenerationFailed(e.to_string()))?;
    Ok(Artifact {
        event_id,
        direction,
        payload,
    })
}

fn one_critique(
    gateway: &Gateway,
    axis: CritiqueAxis,
    artifact_value: &Value,
    event_value: &Value,
    digest: &Value,
) -> Result<Critique, GatewayError> {
    let (system, user) = prompts::render_review_prompt(axis.focus(), artifact_value, event_value, digest);
    let request =
        GenerationRequest::new(AgentRole::Critic, system, user).with_schema(SchemaId::Critique);
    match gateway.complete_json_with_repair(&request, SchemaId::Critique) {
        Ok(value) => {
            let verdict = match value["verdict"].as_str() {
                Some("revise") => Verdict::Revise,
                _ => Verdict::Approve,
            };
            let feedback = value["feedback"].as_str().unwrap_or_default().to_string();
            Ok(Critique {
                axis,
                verdict,
                feedback,
            })
        }
        Err(err) if is_budget(&err) => Err(err),
        Err(err) => {
            // critic outage degrades to approval rather than aborting the artifact
            log::warn!("critic {axis:?} unavailable: {err}");
            Ok(Critique {
                axis,
                verdict: Verdict::Approve,
                feedback: "critic unavailable".into(),
            })
        }
    }
}

/// Three independent critic calls, one per axis, in axis order.
pub fn critique(
    gateway: &Gateway,
    artifact: &Artifact,
    event: &ExpandedEvent,
    profile: &PersonaProfile,
) -> Result<Vec<Critique>, GatewayError> {
    let artifact_value = artifact.payload.to_value();
    let event_value = prompts::event_to_value(event);
    let digest = prompts::profile_digest(profile);
    CritiqueAxis::ALL
        .into_iter()
        .map(|axis| one_critique(gateway, axis, &artifact_value, &event_value, &digest))
        .collect()
}

/// Revise the artifact per the critics' concatenated feedback. The revision
/// must be the same kind and validate; otherwise `RevisionFailed` and the
/// caller keeps the prior version.
pub fn revise(
    gateway: &Gateway,
    artifact: &Artifact,
    critiques: &[Critique],
) -> Result<Artifact, EngineError> {
    let suggestions: Vec<String> = critiques
        .iter()
        .filter(|c| c.verdict == Verdict::Revise && !c.feedback.trim().is_empty())
        .map(|c| format!("[{}] {}", serde_json::to_string(&c.axis).unwrap().trim_matches('"'), c.feedback))
        .collect();
    let kind = artifact.kind();
    let (system, user) =
        prompts::render_revision_prompt(kind, &artifact.payload.to_value(), &suggestions.join("\n"));
    let request = GenerationRequest::new(AgentRole::ArtifactGenerator, system, user)
        .with_schema(kind.schema());
    let value = gateway
        .complete_json_with_repair(&request, kind.schema())
        .map_err(|e| match e {
            GatewayError::SchemaViolation { .. } | GatewayError::NoJsonFound => {
                EngineError::RevisionFailed(e.to_string())
            }
            other => EngineError::Gateway(other),
        })?;
    let payload = ArtifactPayload::from_value(kind, value)
        .map_err(|e| EngineError::RevisionFailed(e.to_string()))?;
    Ok(Artifact {
        event_id: artifact.event_id,
        direction: artifact.direction,
        payload,
    })
}

/// Pick the artifact kind for the event, then run the refine loop.
pub fn refine_auto(
    gateway: &Gateway,
    event: &ExpandedEvent,
    event_id: NodeId,
    profile: &PersonaProfile,
    max_cycles: u32,
) -> Result<RefinedArtifact, EngineError> {
    let (kind, direction) = choose_artifact_kind(gateway, event)?;
    refine(gateway, event, event_id, profile, kind, direction, max_cycles)
}

/// Full generator–critic loop for one event of a known kind. Each cycle
/// critiques the current artifact; all-approve stops the loop, any revise
/// verdict triggers one revision. A revision that fails keeps the prior
/// version. On the repair-free path the gateway sees exactly
/// 1 (outline) + 1 (generate) + cycles_used * 3 (critiques) + one revision
/// per non-approving cycle, which callers can audit from the cost ledger.
pub fn refine(
    gateway: &Gateway,
    event: &ExpandedEvent,
    event_id: NodeId,
    profile: &PersonaProfile,
    kind: ArtifactKind,
    direction: Direction,
    max_cycles: u32,
) -> Result<RefinedArtifact, EngineError> {
    let max_cycles = max_cycles.clamp(1, MAX_CYCLES_CEILING);
    let outline = generate_outline(gateway, event, profile, direction)?;
    let mut artifact = generate_artifact(gateway, &outline, event, event_id, profile, kind, direction)?;

    let mut cycles_used = 0;
    let mut approved = false;
    while cycles_used < max_cycles {
        let critiques = critique(gateway, &artifact, event, profile)?;
        cycles_used += 1;
        if critiques.iter().all(|c| c.verdict == Verdict::Approve) {
            approved = true;
            break;
        }
        match revise(gateway, &artifact, &critiques) {
            Ok(revised) => artifact = revised,
            Err(EngineError::Gateway(err)) if is_budget(&err) => return Err(EngineError::Gateway(err)),
            Err(err) => log::warn!("revision kept prior version: {err}"),
        }
    }

    Ok(RefinedArtifact {
        artifact,
        cycles_used,
        approved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::mock::MockProvider;
    use crate::gateway::testing::{RoutedProvider, ScriptedProvider};
    use crate::gateway::{Gateway, Provider};
    use chrono::NaiveDate;
    use std::sync::Arc;

    fn event() -> ExpandedEvent {
        ExpandedEvent {
            event: "receive boarding pass".into(),
            detailed_description: "airline sends the mobile boarding pass".into(),
            frequency: crate::event_memory::Frequency::Once,
            location: String::new(),
            other_participants: Vec::new(),
            start_time: NaiveDate::from_ymd_opt(2024, 6, 1).unwrap().and_hms_opt(7, 0, 0).unwrap(),
            end_time: NaiveDate::from_ymd_opt(2024, 6, 1).unwrap().and_hms_opt(7, 30, 0).unwrap(),
        }
    }

    fn profile() -> PersonaProfile {
        crate::persona::tests::mock_profile(17)
    }

    fn approve() -> String {
        r#"{"verdict": "approve", "feedback": ""}"#.to_string()
    }

    fn revise_critique(note: &str) -> String {
        format!(r#"{{"verdict": "revise", "feedback": "{note}"}}"#)
    }

    #[test]
    fn fixed_choice_backend_routes_the_kind() {
        let provider = RoutedProvider::new(|req: &GenerationRequest| match req.schema_hint {
            Some(SchemaId::ArtifactChoice) => {
                r#"{"kind": "reminder", "direction": "sent"}"#.to_string()
            }
            _ => MockProvider::new(1).complete(req).unwrap().text,
        });
        let gateway = Gateway::new(Arc::new(provider));
        let (kind, direction) = choose_artifact_kind(&gateway, &event()).unwrap();
        assert_eq!(kind, ArtifactKind::Reminder);
        assert_eq!(direction, Direction::Sent);
    }

    #[test]
    fn unparseable_choice_falls_back_to_received_email() {
        let provider = RoutedProvider::new(|req: &GenerationRequest| match req.schema_hint {
            Some(SchemaId::ArtifactChoice) => "a fax, probably?".to_string(),
            _ => MockProvider::new(1).complete(req).unwrap().text,
        });
        let gateway = Gateway::new(Arc::new(provider));
        let (kind, direction) = choose_artifact_kind(&gateway, &event()).unwrap();
        assert_eq!(kind, ArtifactKind::Email);
        assert_eq!(direction, Direction::Received);
    }

    #[test]
    fn keyword_routing_mock_picks_the_boarding_pass() {
        // routes on the event title embedded in the prompt
        let provider = RoutedProvider::new(|req: &GenerationRequest| {
            match req.schema_hint {
                Some(SchemaId::ArtifactChoice) if req.user_prompt.contains("boarding pass") => {
                    r#"{"kind": "wallet_pass", "direction": "received"}"#.to_string()
                }
                Some(SchemaId::WalletPass) => serde_json::json!({
                    "pass_kind": "boarding_pass",
                    "title": "Boarding pass",
                    "reference_code": "ZX12AB",
                    "valid_from": "2024-06-01T07:00:00",
                    "valid_until": "2024-06-01T09:00:00",
                })
                .to_string(),
                _ => MockProvider::new(1).complete(req).unwrap().text,
            }
        });
        let gateway = Gateway::new(Arc::new(provider));
        let profile = profile();
        let refined = refine_auto(&gateway, &event(), NodeId(0), &profile, 3).unwrap();
        match &refined.artifact.payload {
            ArtifactPayload::WalletPass(pass) => {
                assert_eq!(pass.pass_kind, crate::artifact::PassKind::BoardingPass)
            }
            other => panic!("expected wallet pass, got {other:?}"),
        }
    }

    #[test]
    fn outline_is_nonempty_and_mentions_the_event_on_echo_mock() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(4)));
        let outline = generate_outline(&gateway, &event(), &profile(), Direction::Received).unwrap();
        assert!(!outline.0.trim().is_empty());
        assert!(outline.0.contains("receive boarding pass"));
    }

    #[test]
    fn empty_outline_twice_fails() {
        let provider = RoutedProvider::new(|req: &GenerationRequest| match req.schema_hint {
            None => "   ".to_string(),
            _ => MockProvider::new(1).complete(req).unwrap().text,
        });
        let gateway = Gateway::new(Arc::new(provider));
        assert!(matches!(
            generate_outline(&gateway, &event(), &profile(), Direction::Sent),
            Err(EngineError::OutlineFailed(_))
        ));
    }

    #[test]
    fn generated_email_has_all_six_keys() {
        let gateway = Gateway::new(Arc::new(MockProvider::new(4)));
        let profile = profile();
        let outline = Outline("- greeting\n- details".into());
        let artifact = generate_artifact(
            &gateway,
            &outline,
            &event(),
            NodeId(3),
            &profile,
            ArtifactKind::Email,
            Direction::Sent,
        )
        .unwrap();
        assert!(artifact.payload.validate().is_empty());
        assert_eq!(artifact.event_id, NodeId(3));
    }

    #[test]
    fn missing_subject_repairs_then_fails() {
        let broken = r#"{"sender_name": "A", "from_address": "a@x.io", "to_address": "b@y.io",
                         "send_time": "2024-01-01T08:00:00", "body": "hi"}"#;
        let provider = ScriptedProvider::new(1)
            .script(Some(SchemaId::Email), vec![broken.into(), broken.into()]);
        let gateway = Gateway::new(Arc::new(provider));
        let outline = Outline("- x".into());
        let err = generate_artifact(
            &gateway,
            &outline,
            &event(),
            NodeId(0),
            &profile(),
            ArtifactKind::Email,
            Direction::Sent,
        )
        .unwrap_err();
        match err {
            EngineError::GenerationFailed(msg) => assert!(msg.contains("subject")),
            other => panic!("expected GenerationFailed, got {other:?}"),
        }
    }

    #[test]
    fn calendar_threads_event_times_on_echo_mock() {
        // the default mock echoes the fenced event's times into the entry
        let gateway = Gateway::new(Arc::new(MockProvider::new(4)));
        let outline = Outline("- agenda".into());
        let artifact = generate_artifact(
            &gateway,
            &outline,
            &event(),
            NodeId(0),
            &profile(),
            ArtifactKind::CalendarEntry,
            Direction::Received,
        )
        .unwrap();
        match &artifact.payload {
            ArtifactPayload::CalendarEntry(entry) => {
                assert_eq!(entry.start_time, event().start_time);
                assert_eq!(entry.end_time, event().end_time);
            }
            other => panic!("expected calendar entry, got {other:?}"),
        }
    }

    #[test]
    fn three_critiques_one_per_axis() {
        let provider = ScriptedProvider::new(1).script(
            Some(SchemaId::Critique),
            vec![approve(), revise_critique("too terse"), approve()],
        );
        let gateway = Gateway::new(Arc::new(provider));
        let artifact = Artifact {
            event_id: NodeId(0),
            direction: Direction::Sent,
            payload: ArtifactPayload::Reminder(crate::artifact::Reminder {
                title: "pay rent".into(),
                due_time: event().start_time,
                note: None,
            }),
        };
        let critiques = critique(&gateway, &artifact, &event(), &profile()).unwrap();
        assert_eq!(critiques.len(), 3);
        assert_eq!(
            critiques.iter().map(|c| c.axis).collect::<Vec<_>>().as_slice(),
            &CritiqueAxis::ALL
        );
        // the second scripted verdict lands on the persona-consistency call
        assert_eq!(critiques[1].verdict, Verdict::Revise);
    }

    #[test]
    fn critic_outage_degrades_to_approval() {
        // critique schema never parses -> repair fails -> degraded approve
        let provider = RoutedProvider::new(|req: &GenerationRequest| match req.schema_hint {
            Some(SchemaId::Critique) => "the critic is out to lunch".to_string(),
            _ => MockProvider::new(1).complete(req).unwrap().text,
        });
        let gateway = Gateway::new(Arc::new(provider));
        let artifact = Artifact {
            event_id: NodeId(0),
            direction: Direction::Sent,
            payload: ArtifactPayload::Reminder(crate::artifact::Reminder {
                title: "water plants".into(),
                due_time: event().start_time,
                note: None,
            }),
        };
        let critiques = critique(&gateway, &artifact, &event(), &profile()).unwrap();
        assert_eq!(critiques.len(), 3);
        assert!(critiques
            .iter()
            .all(|c| c.verdict == Verdict::Approve && c.feedback == "critic unavailable"));
    }

    #[test]
    fn identity_reviser_returns_the_same_artifact() {
        let original = Artifact {
            event_id: NodeId(4),
            direction: Direction::Sent,
            payload: ArtifactPayload::Email(crate::artifact::EmailArtifact {
                sender_name: "Ana Weber".into(),
                from_address: "ana@example.com".into(),
                to_address: "team@example.org".into(),
                send_time: event().start_time,
                subject: "flight details".into(),
                body: "boarding pass attached".into(),
            }),
        };
        let provider = ScriptedProvider::new(1).script(
            Some(SchemaId::Email),
            vec![original.payload.to_value().to_string()],
        );
        let gateway = Gateway::new(Arc::new(provider));
        let critiques = vec![Critique {
            axis: CritiqueAxis::RealismFluency,
            verdict: Verdict::Revise,
            feedback: "no notes, resend as-is".into(),
        }];
        let revised = revise(&gateway, &original, &critiques).unwrap();
        assert_eq!(revised, original);
    }

    #[test]
    fn subject_feedback_changes_only_the_subject_on_echo_mock() {
        // reviser that parses the original from the prompt and rewrites the
        // subject, echoing every other key
        let provider = RoutedProvider::new(|req: &GenerationRequest| {
            let fenced = req
                .user_prompt
                .split("```json")
                .nth(1)
                .and_then(|rest| rest.split("```").next())
                .expect("original artifact fenced in prompt");
            let mut value: serde_json::Value = serde_json::from_str(fenced.trim()).unwrap();
            value["subject"] = serde_json::Value::String("fixed subject".into());
            value.to_string()
        });
        let gateway = Gateway::new(Arc::new(provider));
        let original = Artifact {
            event_id: NodeId(9),
            direction: Direction::Sent,
            payload: ArtifactPayload::Email(crate::artifact::EmailArtifact {
                sender_name: "Ana Weber".into(),
                from_address: "ana@example.com".into(),
                to_address: "team@example.org".into(),
                send_time: event().start_time,
                subject: "tpyo in subject".into(),
                body: "unchanged body".into(),
            }),
        };
        let critiques = vec![Critique {
            axis: CritiqueAxis::RealismFluency,
            verdict: Verdict::Revise,
            feedback: "fix subject".into(),
        }];
        let revised = revise(&gateway, &original, &critiques).unwrap();
        match (&revised.payload, &original.payload) {
            (ArtifactPayload::Email(new), ArtifactPayload::Email(old)) => {
                assert_eq!(new.subject, "fixed subject");
                assert_eq!(new.body, old.body);
                assert_eq!(new.sender_name, old.sender_name);
                assert_eq!(new.send_time, old.send_time);
            }
            other => panic!("expected emails, got {other:?}"),
        }
    }

    #[test]
    fn all_approve_stops_after_one_cycle() {
        let provider = ScriptedProvider::new(2).script(
            Some(SchemaId::Critique),
            vec![approve(), approve(), approve()],
        );
        let gateway = Gateway::new(Arc::new(provider));
        let refined = refine_auto(&gateway, &event(), NodeId(0), &profile(), 3).unwrap();
        assert_eq!(refined.cycles_used, 1);
        assert!(refined.approved);
    }

    #[test]
    fn always_revise_exhausts_the_budget() {
        let provider = RoutedProvider::new(|req: &GenerationRequest| match req.schema_hint {
            Some(SchemaId::Critique) => revise_critique("still not right"),
            _ => MockProvider::new(3).complete(req).unwrap().text,
        });
        let gateway = Gateway::new(Arc::new(provider));
        let refined = refine_auto(&gateway, &event(), NodeId(0), &profile(), 3).unwrap();
        assert_eq!(refined.cycles_used, 3);
        assert!(!refined.approved);
    }

    #[test]
    fn approve_on_second_cycle() {
        let mut script = vec![
            revise_critique("cycle one: revise"),
            approve(),
            approve(),
        ];
        script.extend([approve(), approve(), approve()]);
        let provider = ScriptedProvider::new(2).script(Some(SchemaId::Critique), script);
        let gateway = Gateway::new(Arc::new(provider));
        let refined = refine_auto(&gateway, &event(), NodeId(0), &profile(), 3).unwrap();
        assert_eq!(refined.cycles_used, 2);
        assert!(refined.approved);
    }

    #[test]
    fn broken_revision_keeps_prior_artifact() {
        let provider = RoutedProvider::new(|req: &GenerationRequest| {
            match req.schema_hint {
                Some(SchemaId::Critique) => revise_critique("please fix"),
                // revision replies are garbage; initial generation comes from the mock
                _ if req.user_prompt.contains("Suggestions:") => "not json".to_string(),
                _ => MockProvider::new(9).complete(req).unwrap().text,
            }
        });
        let gateway = Gateway::new(Arc::new(provider));
        let refined = refine_auto(&gateway, &event(), NodeId(0), &profile(), 2).unwrap();
        assert_eq!(refined.cycles_used, 2);
        assert!(!refined.approved);
        assert!(refined.artifact.payload.validate().is_empty());
    }

    #[test]
    fn max_cycles_is_clamped_to_the_ceiling() {
        let provider = RoutedProvider::new(|req: &GenerationRequest| match req.schema_hint {
            Some(SchemaId::Critique) => revise_critique("never good enough"),
            _ => MockProvider::new(3).complete(req).unwrap().text,
        });
        let gateway = Gateway::new(Arc::new(provider));
        let refined = refine_auto(&gateway, &event(), NodeId(0), &profile(), 99).unwrap();
        assert_eq!(refined.cycles_used, MAX_CYCLES_CEILING);
    }
}
