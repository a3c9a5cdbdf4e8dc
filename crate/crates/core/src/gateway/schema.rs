//! Output contracts for every JSON shape the pipeline asks a model to emit.
//!
//! Each [`SchemaId`] names one contract. [`validate`] checks a raw
//! `serde_json::Value` against it and returns the full violation list (field
//! path + message) instead of stopping at the first problem, because repair
//! prompts feed the whole list back to the model.

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Wall-clock format used everywhere: RFC3339 layout with the zone omitted.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

pub const FREQUENCIES: [&str; 6] = ["daily", "weekly", "monthly", "seasonally", "yearly", "once"];
pub const COLORS: [&str; 8] = [
    "black", "blue", "brown", "gold", "gray", "green", "silver", "white",
];
pub const ARTIFACT_KINDS: [&str; 5] = [
    "email",
    "message_thread",
    "calendar_entry",
    "reminder",
    "wallet_pass",
];
pub const DIRECTIONS: [&str; 2] = ["sent", "received"];
pub const PASS_KINDS: [&str; 4] = ["boarding_pass", "ticket", "membership", "coupon"];
pub const VERDICTS: [&str; 2] = ["approve", "revise"];
pub const JUDGE_AXES: [&str; 5] = ["Tone", "Fluency", "Coherence", "Informativeness", "Engagement"];

pub const FRIEND_COUNT: usize = 5;
pub const COWORKER_COUNT: usize = 8;
pub const CLASSMATE_COUNT: usize = 10;

/// Identifier of a registered JSON output contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaId {
    Profile,
    SeedEventList,
    ExpandedEvent,
    ExpandedEventList,
    ArtifactChoice,
    Email,
    MessageThread,
    CalendarEntry,
    Reminder,
    WalletPass,
    Critique,
    JudgeScores,
}

impl SchemaId {
    pub fn name(self) -> &'static str {
        match self {
            SchemaId::Profile => "profile",
            SchemaId::SeedEventList => "seed_event_list",
            SchemaId::ExpandedEvent => "expanded_event",
            SchemaId::ExpandedEventList => "expanded_event_list",
            SchemaId::ArtifactChoice => "artifact_choice",
            SchemaId::Email => "email",
            SchemaId::MessageThread => "message_thread",
            SchemaId::CalendarEntry => "calendar_entry",
            SchemaId::Reminder => "reminder",
            SchemaId::WalletPass => "wallet_pass",
            SchemaId::Critique => "critique",
            SchemaId::JudgeScores => "judge_scores",
        }
    }
}

/// One contract violation, addressable by field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Validate `value` against `schema`; empty result means valid.
pub fn validate(schema: SchemaId, value: &Value) -> Vec<Violation> {
    let mut v = Vec::new();
    match schema {
        SchemaId::Profile => validate_profile(value, &mut v),
        SchemaId::SeedEventList => validate_seed_event_list(value, &mut v),
        SchemaId::ExpandedEvent => validate_expanded_event(value, "", &mut v),
        SchemaId::ExpandedEventList => validate_expanded_event_list(value, &mut v),
        SchemaId::ArtifactChoice => validate_artifact_choice(value, &mut v),
        SchemaId::Email => validate_email(value, &mut v),
        SchemaId::MessageThread => validate_message_thread(value, &mut v),
        SchemaId::CalendarEntry => validate_calendar_entry(value, &mut v),
        SchemaId::Reminder => validate_reminder(value, &mut v),
        SchemaId::WalletPass => validate_wallet_pass(value, &mut v),
        SchemaId::Critique => validate_critique(value, &mut v),
        SchemaId::JudgeScores => validate_judge_scores(value, &mut v),
    }
    v
}

/// Minimal syntactic check: one `@`, non-empty local part, dotted domain,
/// no whitespace. Catches the usual model slips ("a@@b", missing domain).
pub fn is_valid_email(s: &str) -> bool {
    if s.chars().any(char::is_whitespace) {
        return false;
    }
    let mut parts = s.split('@');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(local), Some(domain), None) => {
            !local.is_empty()
                && !domain.is_empty()
                && domain.contains('.')
                && !domain.starts_with('.')
                && !domain.ends_with('.')
        }
        _ => false,
    }
}

pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT).ok()
}

fn path(prefix: &str, field: &str) -> String {
    if prefix.is_empty() {
        field.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn obj<'a>(value: &'a Value, out: &mut Vec<Violation>) -> Option<&'a serde_json::Map<String, Value>> {
    match value.as_object() {
        Some(m) => Some(m),
        None => {
            out.push(Violation::new("$", "expected a JSON object"));
            None
        }
    }
}

fn req_str(m: &serde_json::Map<String, Value>, prefix: &str, field: &str, out: &mut Vec<Violation>) -> Option<String> {
    match m.get(field) {
        Some(Value::String(s)) if !s.trim().is_empty() => Some(s.clone()),
        Some(Value::String(_)) => {
            out.push(Violation::new(path(prefix, field), "must be non-empty"));
            None
        }
        Some(_) => {
            out.push(Violation::new(path(prefix, field), "must be a string"));
            None
        }
        None => {
            out.push(Violation::new(path(prefix, field), "missing required field"));
            None
        }
    }
}

fn opt_str(m: &serde_json::Map<String, Value>, prefix: &str, field: &str, out: &mut Vec<Violation>) -> Option<String> {
    match m.get(field) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            out.push(Violation::new(path(prefix, field), "must be a string"));
            None
        }
    }
}

fn req_enum(
    m: &serde_json::Map<String, Value>,
    prefix: &str,
    field: &str,
    allowed: &[&str],
    out: &mut Vec<Violation>,
) -> Option<String> {
    let s = req_str(m, prefix, field, out)?;
    if allowed.contains(&s.as_str()) {
        Some(s)
    } else {
        out.push(Violation::new(
            path(prefix, field),
            format!("\"{s}\" not in allowed set {allowed:?}"),
        ));
        None
    }
}

fn req_timestamp(
    m: &serde_json::Map<String, Value>,
    prefix: &str,
    field: &str,
    out: &mut Vec<Violation>,
) -> Option<NaiveDateTime> {
    let s = req_str(m, prefix, field, out)?;
    match parse_timestamp(&s) {
        Some(t) => Some(t),
        None => {
            out.push(Violation::new(
                path(prefix, field),
                format!("\"{s}\" is not a zone-less RFC3339 timestamp (expected {TIMESTAMP_FORMAT})"),
            ));
            None
        }
    }
}

fn name_list(
    m: &serde_json::Map<String, Value>,
    prefix: &str,
    field: &str,
    exact: Option<usize>,
    required: bool,
    out: &mut Vec<Violation>,
) {
    let v = match m.get(field) {
        Some(v) => v,
        None if required => {
            out.push(Violation::new(path(prefix, field), "missing required field"));
            return;
        }
        None => return,
    };
    let Some(arr) = v.as_array() else {
        out.push(Violation::new(path(prefix, field), "must be a list of names"));
        return;
    };
    if let Some(n) = exact {
        if arr.len() != n {
            out.push(Violation::new(
                path(prefix, field),
                format!("must list exactly {n} names, got {}", arr.len()),
            ));
        }
    }
    for (i, item) in arr.iter().enumerate() {
        match item.as_str() {
            Some(s) if !s.trim().is_empty() => {}
            _ => out.push(Violation::new(
                format!("{}[{i}]", path(prefix, field)),
                "must be a non-empty name",
            )),
        }
    }
}

fn validate_profile(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    for field in [
        "name",
        "surname",
        "given_name",
        "locale",
        "timezone",
        "age",
        "gender",
        "income",
        "ethnicity",
        "family_setup",
        "nationality",
        "phone",
        "height",
        "weight",
        "occupation",
        "weekdays_routines",
        "weekend_routines",
        "life_events_for_holidays_and_vacations",
        "home_address",
    ] {
        req_str(m, "", field, out);
    }
    if let Some(email) = req_str(m, "", "email", out) {
        if !is_valid_email(&email) {
            out.push(Violation::new("email", format!("\"{email}\" is not a valid address")));
        }
    }
    req_enum(m, "", "eye_color", &COLORS, out);
    req_enum(m, "", "hair_color", &COLORS, out);
    opt_str(m, "", "middle_name", out);
    opt_str(m, "", "office_address", out);
    opt_str(m, "", "school_address", out);
    name_list(m, "", "nicknames", None, true, out);
    name_list(m, "", "friends", Some(FRIEND_COUNT), true, out);
    name_list(m, "", "coworkers", Some(COWORKER_COUNT), true, out);
    if m.contains_key("classmates") && !m["classmates"].is_null() {
        name_list(m, "", "classmates", Some(CLASSMATE_COUNT), false, out);
    }
    match m.get("family_members") {
        Some(Value::Array(arr)) => {
            for (i, member) in arr.iter().enumerate() {
                let prefix = format!("family_members[{i}]");
                let Some(mm) = member.as_object() else {
                    out.push(Violation::new(prefix, "must be an object"));
                    continue;
                };
                for field in ["name", "age", "relation", "occupation", "address"] {
                    req_str(mm, &prefix, field, out);
                }
            }
        }
        Some(_) => out.push(Violation::new("family_members", "must be a list")),
        None => out.push(Violation::new("family_members", "missing required field")),
    }
}

fn validate_seed_event(value: &Value, prefix: &str, out: &mut Vec<Violation>) {
    let Some(m) = value.as_object() else {
        out.push(Violation::new(if prefix.is_empty() { "$" } else { prefix }, "must be an object"));
        return;
    };
    req_str(m, prefix, "event", out);
    req_str(m, prefix, "detailed_description", out);
    req_enum(m, prefix, "frequency", &FREQUENCIES, out);
}

fn validate_seed_event_list(value: &Value, out: &mut Vec<Violation>) {
    let Some(arr) = value.as_array() else {
        out.push(Violation::new("$", "expected a JSON list of events"));
        return;
    };
    for (i, item) in arr.iter().enumerate() {
        validate_seed_event(item, &format!("[{i}]"), out);
    }
}

fn validate_expanded_event(value: &Value, prefix: &str, out: &mut Vec<Violation>) {
    let Some(m) = value.as_object() else {
        out.push(Violation::new(if prefix.is_empty() { "$" } else { prefix }, "must be an object"));
        return;
    };
    req_str(m, prefix, "event", out);
    req_str(m, prefix, "detailed_description", out);
    req_enum(m, prefix, "frequency", &FREQUENCIES, out);
    // location may be blank when the event has no single venue
    match m.get("location") {
        Some(Value::String(_)) | None | Some(Value::Null) => {}
        Some(_) => out.push(Violation::new(path(prefix, "location"), "must be a string")),
    }
    match m.get("other_participants") {
        Some(Value::Array(arr)) => {
            for (i, item) in arr.iter().enumerate() {
                if item.as_str().is_none_or(|s| s.trim().is_empty()) {
                    out.push(Violation::new(
                        format!("{}[{i}]", path(prefix, "other_participants")),
                        "must be a non-empty name",
                    ));
                }
            }
        }
        None | Some(Value::Null) => {}
        Some(_) => out.push(Violation::new(
            path(prefix, "other_participants"),
            "must be a list of names",
        )),
    }
    let start = req_timestamp(m, prefix, "start_time", out);
    let end = req_timestamp(m, prefix, "end_time", out);
    if let (Some(s), Some(e)) = (start, end) {
        if s > e {
            out.push(Violation::new(
                path(prefix, "end_time"),
                "end_time precedes start_time",
            ));
        }
    }
}

fn validate_expanded_event_list(value: &Value, out: &mut Vec<Violation>) {
    let Some(arr) = value.as_array() else {
        out.push(Violation::new("$", "expected a JSON list of events"));
        return;
    };
    for (i, item) in arr.iter().enumerate() {
        validate_expanded_event(item, &format!("[{i}]"), out);
    }
}

fn validate_artifact_choice(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    req_enum(m, "", "kind", &ARTIFACT_KINDS, out);
    req_enum(m, "", "direction", &DIRECTIONS, out);
}

fn validate_email(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    req_str(m, "", "sender_name", out);
    for field in ["from_address", "to_address"] {
        if let Some(addr) = req_str(m, "", field, out) {
            if !is_valid_email(&addr) {
                out.push(Violation::new(field, format!("\"{addr}\" is not a valid address")));
            }
        }
    }
    req_timestamp(m, "", "send_time", out);
    req_str(m, "", "subject", out);
    req_str(m, "", "body", out);
}

fn validate_message_thread(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    let mut participants: Vec<String> = Vec::new();
    match m.get("participants") {
        Some(Value::Array(arr)) => {
            if arr.len() < 2 {
                out.push(Violation::new("participants", "a thread needs at least 2 participants"));
            }
            for (i, item) in arr.iter().enumerate() {
                match item.as_str() {
                    Some(s) if !s.trim().is_empty() => participants.push(s.to_string()),
                    _ => out.push(Violation::new(
                        format!("participants[{i}]"),
                        "must be a non-empty name",
                    )),
                }
            }
        }
        _ => out.push(Violation::new("participants", "missing or not a list")),
    }
    match m.get("messages") {
        Some(Value::Array(arr)) => {
            let mut prev: Option<NaiveDateTime> = None;
            for (i, item) in arr.iter().enumerate() {
                let prefix = format!("messages[{i}]");
                let Some(mm) = item.as_object() else {
                    out.push(Violation::new(prefix, "must be an object"));
                    continue;
                };
                if let Some(sender) = req_str(mm, &prefix, "sender", out) {
                    if !participants.is_empty() && !participants.contains(&sender) {
                        out.push(Violation::new(
                            path(&prefix, "sender"),
                            format!("\"{sender}\" is not a thread participant"),
                        ));
                    }
                }
                req_str(mm, &prefix, "text", out);
                if let Some(t) = req_timestamp(mm, &prefix, "send_time", out) {
                    if let Some(p) = prev {
                        if t < p {
                            out.push(Violation::new(
                                path(&prefix, "send_time"),
                                "timestamps must be non-decreasing",
                            ));
                        }
                    }
                    prev = Some(t);
                }
            }
        }
        _ => out.push(Violation::new("messages", "missing or not a list")),
    }
}

fn validate_calendar_entry(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    req_str(m, "", "title", out);
    let start = req_timestamp(m, "", "start_time", out);
    let end = req_timestamp(m, "", "end_time", out);
    if let (Some(s), Some(e)) = (start, end) {
        if s > e {
            out.push(Violation::new("end_time", "end_time precedes start_time"));
        }
    }
    opt_str(m, "", "location", out);
    name_list(m, "", "attendees", None, false, out);
}

fn validate_reminder(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    req_str(m, "", "title", out);
    req_timestamp(m, "", "due_time", out);
    opt_str(m, "", "note", out);
}

fn validate_wallet_pass(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    req_enum(m, "", "pass_kind", &PASS_KINDS, out);
    req_str(m, "", "title", out);
    req_str(m, "", "reference_code", out);
    let from = req_timestamp(m, "", "valid_from", out);
    let until = req_timestamp(m, "", "valid_until", out);
    if let (Some(f), Some(u)) = (from, until) {
        if f > u {
            out.push(Violation::new("valid_until", "valid_until precedes valid_from"));
        }
    }
}

fn validate_critique(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    let verdict = req_enum(m, "", "verdict", &VERDICTS, out);
    let feedback = opt_str(m, "", "feedback", out);
    if verdict.as_deref() == Some("revise")
        && feedback.as_deref().is_none_or(|f| f.trim().is_empty())
    {
        out.push(Violation::new("feedback", "revise verdicts must carry feedback"));
    }
}

fn validate_judge_axis(m: &serde_json::Map<String, Value>, axis: &str, summary_key: &str, out: &mut Vec<Violation>) {
    let Some(entry) = m.get(axis) else {
        out.push(Violation::new(axis, "missing required field"));
        return;
    };
    let Some(em) = entry.as_object() else {
        out.push(Violation::new(axis, "must be an object"));
        return;
    };
    match em.get("score").and_then(Value::as_f64) {
        Some(score) if (1.0..=5.0).contains(&score) => {}
        Some(score) => out.push(Violation::new(
            format!("{axis}.score"),
            format!("{score} outside the 1-5 scale"),
        )),
        None => out.push(Violation::new(format!("{axis}.score"), "missing numeric score")),
    }
    req_str(em, axis, summary_key, out);
}

fn validate_judge_scores(value: &Value, out: &mut Vec<Violation>) {
    let Some(m) = obj(value, out) else { return };
    for axis in JUDGE_AXES {
        validate_judge_axis(m, axis, "explanation", out);
    }
    validate_judge_axis(m, "Overall", "summary", out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn email_syntax() {
        assert!(is_valid_email("ana.silva@example.com"));
        assert!(!is_valid_email("a@@b"));
        assert!(!is_valid_email("nodomain@"));
        assert!(!is_valid_email("no at sign"));
        assert!(!is_valid_email("x@nodot"));
    }

    #[test]
    fn seed_event_enum_is_enforced() {
        let v = json!([{"event": "t", "detailed_description": "d", "frequency": "biweekly"}]);
        let violations = validate(SchemaId::SeedEventList, &v);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "[0].frequency");
    }

    #[test]
    fn expanded_event_rejects_reversed_times() {
        let v = json!({
            "event": "t", "detailed_description": "d", "frequency": "once",
            "location": "", "other_participants": [],
            "start_time": "2024-03-02T10:00:00", "end_time": "2024-03-01T10:00:00"
        });
        let violations = validate(SchemaId::ExpandedEvent, &v);
        assert!(violations.iter().any(|v| v.field == "end_time"));
    }

    #[test]
    fn email_missing_subject_is_reported_by_name() {
        let v = json!({
            "sender_name": "A", "from_address": "a@x.io", "to_address": "b@y.io",
            "send_time": "2024-01-01T08:00:00", "body": "hello"
        });
        let violations = validate(SchemaId::Email, &v);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].field, "subject");
    }

    #[test]
    fn judge_score_range() {
        let mut v = json!({});
        for axis in JUDGE_AXES {
            v[axis] = json!({"score": 7, "explanation": "x"});
        }
        v["Overall"] = json!({"score": 4.2, "summary": "x"});
        let violations = validate(SchemaId::JudgeScores, &v);
        assert_eq!(violations.len(), 5);
        assert!(violations.iter().all(|v| v.field.ends_with(".score")));
    }
}
