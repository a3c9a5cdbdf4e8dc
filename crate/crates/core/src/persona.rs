//! The persona agent (stage 1): expand a demographic draw into a full
//! profile via the profile-generation prompt, then validate it.

use crate::demographics::DemographicDraw;
use crate::gateway::schema::{self, SchemaId, Violation};
use crate::gateway::{AgentRole, Gateway, GatewayError, GenerationRequest};
use crate::prompts;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub name: String,
    pub age: String,
    pub relation: String,
    pub occupation: String,
    pub address: String,
}

/// A synthetic individual: demographics, social graph, routines. Field names
/// match the profile prompt's output contract exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonaProfile {
    pub name: String,
    pub surname: String,
    pub given_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub middle_name: Option<String>,
    pub nicknames: Vec<String>,
    pub locale: String,
    pub timezone: String,
    pub age: String,
    pub gender: String,
    pub income: String,
    pub ethnicity: String,
    pub family_setup: String,
    pub nationality: String,
    pub email: String,
    pub phone: String,
    pub eye_color: String,
    pub hair_color: String,
    pub height: String,
    pub weight: String,
    pub occupation: String,
    pub weekdays_routines: String,
    pub weekend_routines: String,
    pub life_events_for_holidays_and_vacations: String,
    pub family_members: Vec<FamilyMember>,
    pub friends: Vec<String>,
    pub coworkers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classmates: Option<Vec<String>>,
    pub home_address: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub office_address: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub school_address: Option<String>,
}

impl PersonaProfile {
    /// Everyone the persona knows by name; event participants must come from
    /// this set.
    pub fn social_names(&self) -> BTreeSet<String> {
        let mut names: BTreeSet<String> = BTreeSet::new();
        names.extend(self.family_members.iter().map(|m| m.name.clone()));
        names.extend(self.friends.iter().cloned());
        names.extend(self.coworkers.iter().cloned());
        if let Some(classmates) = &self.classmates {
            names.extend(classmates.iter().cloned());
        }
        names
    }
}

/// Invariant check outcome; an empty report means the profile is valid.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum PersonaError {
    #[error("profile generation failed after repair: {}", violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    ProfileGenerationFailed { violations: Vec<Violation> },
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

/// Attributes sampled in the draw must survive into the profile unchanged;
/// the prompt pins them ("must align with the initial input").
fn draw_echo_violations(draw: &DemographicDraw, value: &serde_json::Value) -> Vec<Violation> {
    let mut out = Vec::new();
    for (name, category) in &draw.attributes {
        match value.get(name).and_then(serde_json::Value::as_str) {
            Some(actual) if actual == category => {}
            Some(actual) => out.push(Violation::new(
                name.clone(),
                format!("must equal the input value \"{category}\", got \"{actual}\""),
            )),
            None => out.push(Violation::new(
                name.clone(),
                format!("must carry the input value \"{category}\""),
            )),
        }
    }
    out
}

/// Render the profile prompt for `draw`, call the model, extract and validate
/// JSON. One repair round-trip (with the violation list) is attempted before
/// giving up.
pub fn generate_profile(gateway: &Gateway, draw: &DemographicDraw) -> Result<PersonaProfile, PersonaError> {
    let (system, user) = prompts::render_profile_prompt(&draw.to_prompt_input());
    let request = GenerationRequest::new(AgentRole::Persona, system, user).with_schema(SchemaId::Profile);

    let mut last_violations: Vec<Violation> = Vec::new();
    for attempt in 0..2 {
        let request = if attempt == 0 {
            request.clone()
        } else {
            let mut repair = request.clone();
            let list = last_violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n- ");
            repair.user_prompt = format!(
                "{}\n\nYour previous reply was rejected for these problems:\n- {list}\n\nReply again with only the corrected JSON.",
                request.user_prompt
            );
            repair
        };
        let response = gateway.complete(&request)?;
        match crate::gateway::extract_json(&response.text, SchemaId::Profile) {
            Ok(value) => {
                let echo = draw_echo_violations(draw, &value);
                if echo.is_empty() {
                    let profile: PersonaProfile = serde_json::from_value(value).map_err(|e| {
                        PersonaError::ProfileGenerationFailed {
                            violations: vec![Violation::new("$", e.to_string())],
                        }
                    })?;
                    return Ok(profile);
                }
                last_violations = echo;
            }
            Err(GatewayError::SchemaViolation { violations, .. }) => last_violations = violations,
            Err(GatewayError::NoJsonFound) => {
                last_violations = vec![Violation::new("$", "no JSON value found")]
            }
            Err(other) => return Err(other.into()),
        }
    }
    Err(PersonaError::ProfileGenerationFailed {
        violations: last_violations,
    })
}

/// List every invariant violation; never errors.
pub fn validate_profile(profile: &PersonaProfile) -> ValidationReport {
    let value = serde_json::to_value(profile).expect("profile serializes");
    ValidationReport {
        violations: schema::validate(SchemaId::Profile, &value),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::demographics::{sample_draw, DemographicPrior};
    use crate::gateway::mock::MockProvider;
    use crate::gateway::testing::FixedProvider;
    use std::sync::Arc;

    fn example_prior() -> DemographicPrior {
        DemographicPrior::from_json(
            r#"{"marginals": {
                "age": [["25-34", 1.0]],
                "gender": [["female", 1.0]],
                "ethnicity": [["asian", 1.0]],
                "income": [["75k-100k", 1.0]],
                "locale": [["en-GB", 1.0]],
                "family_setup": [["single", 1.0]],
                "nationality": [["United Kingdom", 1.0]]
            }}"#,
        )
        .unwrap()
    }

    pub(crate) fn mock_profile(seed: u64) -> PersonaProfile {
        let gateway = Gateway::new(Arc::new(MockProvider::new(seed)));
        let draw = sample_draw(&example_prior(), seed);
        generate_profile(&gateway, &draw).unwrap()
    }

    #[test]
    fn mock_backend_yields_schema_valid_profile() {
        let profile = mock_profile(7);
        assert_eq!(profile.friends.len(), 5);
        assert_eq!(profile.coworkers.len(), 8);
        assert!(validate_profile(&profile).is_valid());
    }

    #[test]
    fn draw_attributes_are_pinned_into_the_profile() {
        let profile = mock_profile(11);
        assert_eq!(profile.locale, "en-GB");
        assert_eq!(profile.age, "25-34");
        assert_eq!(profile.nationality, "United Kingdom");
    }

    #[test]
    fn generation_is_deterministic_under_fixed_seed() {
        assert_eq!(mock_profile(9), mock_profile(9));
    }

    #[test]
    fn enum_violation_triggers_repair_then_fails() {
        // backend that always returns an out-of-enum eye color
        let mut profile = serde_json::to_value(mock_profile(3)).unwrap();
        profile["eye_color"] = serde_json::Value::String("purple".into());
        let provider = Arc::new(FixedProvider::new(profile.to_string()));
        let gateway = Gateway::new(provider);
        let draw = sample_draw(&example_prior(), 3);
        match generate_profile(&gateway, &draw) {
            Err(PersonaError::ProfileGenerationFailed { violations }) => {
                assert!(violations.iter().any(|v| v.field == "eye_color"));
            }
            other => panic!("expected ProfileGenerationFailed, got {other:?}"),
        }
        // one original call + one repair round
        assert_eq!(gateway.ledger().len(), 2);
    }

    #[test]
    fn profile_json_keys_match_the_output_contract() {
        let profile = mock_profile(19);
        let value = serde_json::to_value(&profile).unwrap();
        let keys: std::collections::BTreeSet<&str> =
            value.as_object().unwrap().keys().map(String::as_str).collect();
        for required in [
            "name", "surname", "given_name", "nicknames", "locale", "timezone", "age", "gender",
            "income", "ethnicity", "family_setup", "nationality", "email", "phone", "eye_color",
            "hair_color", "height", "weight", "occupation", "weekdays_routines",
            "weekend_routines", "life_events_for_holidays_and_vacations", "family_members",
            "friends", "coworkers", "home_address",
        ] {
            assert!(keys.contains(required), "missing key {required}");
        }
        let allowed_optional = ["middle_name", "classmates", "office_address", "school_address"];
        for key in &keys {
            let expected = [
                "name", "surname", "given_name", "nicknames", "locale", "timezone", "age",
                "gender", "income", "ethnicity", "family_setup", "nationality", "email", "phone",
                "eye_color", "hair_color", "height", "weight", "occupation", "weekdays_routines",
                "weekend_routines", "life_events_for_holidays_and_vacations", "family_members",
                "friends", "coworkers", "home_address",
            ];
            assert!(
                expected.contains(key) || allowed_optional.contains(key),
                "unexpected key {key} outside the contract"
            );
        }
    }

    #[test]
    fn validation_report_names_offending_fields() {
        let mut profile = mock_profile(5);
        assert!(validate_profile(&profile).is_valid());

        profile.friends.truncate(4);
        let report = validate_profile(&profile);
        assert!(report.violations.iter().any(|v| v.field == "friends"));

        profile = mock_profile(5);
        profile.email = "a@@b".into();
        let report = validate_profile(&profile);
        assert!(report.violations.iter().any(|v| v.field == "email"));
    }
}
