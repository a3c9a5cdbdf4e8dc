//! Deterministic offline backend.
//!
//! Output is a pure function of (prompt, seed): the prompt is hashed into a
//! ChaCha stream, and whatever schema the request hints at is populated from
//! that stream. Fields the prompt supplies as fenced JSON input (the
//! demographic draw, the event under expansion, the persona's social graph)
//! are echoed back, mirroring what an instruction-following model is told to
//! preserve. Embeddings are hashed bag-of-words vectors, so texts sharing
//! vocabulary land near each other and identical texts embed identically.

use super::schema::{self, SchemaId};
use super::{approx_tokens, GenerationRequest, Provider, ProviderError, ProviderOutput};
use crate::hashing::{fnv1a_64, splitmix64, text_key, word_tokens};
use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

const EMBED_SALT: u64 = 0x5eed_e4b3_dd1f_0a11;

const LEXICON: [&str; 97] = [
    "morning", "coffee", "meeting", "report", "garden", "bicycle", "market", "recipe", "weekend",
    "project", "deadline", "invoice", "ticket", "museum", "concert", "library", "lecture",
    "workshop", "budget", "travel", "airport", "station", "dinner", "birthday", "holiday",
    "seaside", "mountain", "picnic", "football", "yoga", "swimming", "painting", "photograph",
    "novel", "podcast", "newsletter", "reunion", "appointment", "dentist", "doctor", "pharmacy",
    "grocery", "laundry", "repair", "plumber", "electrician", "insurance", "renewal", "contract",
    "interview", "training", "seminar", "volunteer", "charity", "festival", "parade", "camping",
    "hiking", "fishing", "baking", "knitting", "chess", "cinema", "theater", "gallery", "choir",
    "orchestra", "rehearsal", "tournament", "league", "garage", "basement", "attic", "balcony",
    "terrace", "commute", "tram", "ferry", "harbor", "bridge", "avenue", "boulevard", "square",
    "fountain", "bakery", "butcher", "florist", "bookshop", "pottery", "sculpture", "lantern",
    "harvest", "orchard", "vineyard", "meadow", "riverbank", "lighthouse",
];

const FIRST_NAMES: [&str; 32] = [
    "Ana", "Bruno", "Clara", "Daniel", "Elena", "Felix", "Greta", "Hugo", "Iris", "Jonas",
    "Karin", "Liam", "Marta", "Nina", "Oscar", "Paula", "Quentin", "Rosa", "Samuel", "Teresa",
    "Ulrich", "Vera", "Walter", "Ximena", "Yara", "Zacharias", "Amara", "Bastian", "Celine",
    "Dimitri", "Esther", "Farid",
];

const LAST_NAMES: [&str; 24] = [
    "Alvarez", "Bergstrom", "Carvalho", "Dietrich", "Eriksen", "Fontaine", "Gallagher",
    "Hoffmann", "Ivanov", "Jansen", "Kowalski", "Lindqvist", "Moreau", "Nakamura", "Olsen",
    "Petrov", "Quiroga", "Rossi", "Schneider", "Takahashi", "Ueda", "Vasquez", "Weber", "Zhang",
];

const OCCUPATIONS: [&str; 16] = [
    "graphic designer", "civil engineer", "school teacher", "pharmacist", "data analyst",
    "landscape architect", "sous chef", "paralegal", "dental hygienist", "logistics coordinator",
    "software developer", "freelance translator", "nurse practitioner", "insurance adjuster",
    "bookstore manager", "research technician",
];

const TIMEZONES: [&str; 8] = [
    "America/New_York", "America/Chicago", "America/Denver", "America/Los_Angeles",
    "America/Phoenix", "America/Detroit", "America/Anchorage", "Pacific/Honolulu",
];

const STREETS: [&str; 12] = [
    "Maple Street", "Oak Avenue", "Cedar Lane", "Birch Road", "Willow Drive", "Elm Court",
    "Juniper Way", "Chestnut Boulevard", "Laurel Terrace", "Magnolia Place", "Spruce Alley",
    "Sycamore Row",
];

const VENUES: [&str; 10] = [
    "Riverside Community Center", "Central Library Annex", "Harborview Conference Hall",
    "Greenfield Park Pavilion", "Northgate Clinic", "Old Town Market Hall",
    "Lakeside Sports Complex", "Civic Auditorium", "Sunset Rooftop Lounge", "Midtown Studio",
];

const EVENT_VERBS: [&str; 14] = [
    "attend", "organize", "book", "renew", "review", "plan", "host", "repair", "schedule",
    "prepare", "celebrate", "research", "submit", "confirm",
];

const EVENT_OBJECTS: [&str; 18] = [
    "a team offsite", "the quarterly tax filing", "a pottery class", "the car inspection",
    "a weekend hiking trip", "the club newsletter", "a family reunion", "the garden beds",
    "a dental checkup", "the season tickets", "a charity bake sale", "the home insurance",
    "a language course", "the book club meeting", "a fishing trip", "the choir rehearsal",
    "a museum visit", "the annual health screening",
];

/// Deterministic offline provider.
#[derive(Debug, Clone)]
pub struct MockProvider {
    seed: u64,
    embedding_dim: usize,
}

impl MockProvider {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            embedding_dim: 256,
        }
    }

    pub fn with_embedding_dim(mut self, dim: usize) -> Self {
        self.embedding_dim = dim.max(2);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rng_for(&self, request: &GenerationRequest) -> ChaCha8Rng {
        let key = text_key(
            &format!("{}\n---\n{}", request.system_prompt, request.user_prompt),
            self.seed,
        );
        ChaCha8Rng::seed_from_u64(key)
    }
}

impl Provider for MockProvider {
    fn id(&self) -> String {
        format!("mock/seed{}/dim{}", self.seed, self.embedding_dim)
    }

    fn complete(&self, request: &GenerationRequest) -> Result<ProviderOutput, ProviderError> {
        let mut rng = self.rng_for(request);
        let inputs = fenced_inputs(&request.user_prompt);
        let text = match request.schema_hint {
            Some(SchemaId::Profile) => gen_profile(&mut rng, &inputs).to_string(),
            Some(SchemaId::SeedEventList) => {
                let n = requested_event_count(&request.user_prompt).unwrap_or(10);
                gen_seed_events(&mut rng, n).to_string()
            }
            Some(SchemaId::ExpandedEvent) => gen_expanded_event(&mut rng, &inputs).to_string(),
            Some(SchemaId::ExpandedEventList) => gen_expansion(&mut rng, &inputs).to_string(),
            Some(SchemaId::ArtifactChoice) => gen_choice(&mut rng).to_string(),
            Some(SchemaId::Email) => gen_email(&mut rng, &inputs).to_string(),
            Some(SchemaId::MessageThread) => gen_thread(&mut rng, &inputs).to_string(),
            Some(SchemaId::CalendarEntry) => gen_calendar(&mut rng, &inputs).to_string(),
            Some(SchemaId::Reminder) => gen_reminder(&mut rng, &inputs).to_string(),
            Some(SchemaId::WalletPass) => gen_pass(&mut rng, &inputs).to_string(),
            Some(SchemaId::Critique) => gen_critique(&mut rng).to_string(),
            Some(SchemaId::JudgeScores) => gen_judge(&mut rng).to_string(),
            None => gen_outline(&mut rng, &inputs),
        };
        let input_tokens = approx_tokens(&request.system_prompt) + approx_tokens(&request.user_prompt);
        let output_tokens = approx_tokens(&text);
        Ok(ProviderOutput {
            text,
            input_tokens,
            output_tokens,
        })
    }

    fn embed(&self, text: &str) -> Result<Vec<f32>, ProviderError> {
        Ok(hashed_bow_embedding(text, self.embedding_dim))
    }
}

/// Hashed bag-of-words embedding: each token adds ±1 to one coordinate,
/// then the vector is L2-normalized. Token-free text maps to a fixed
/// sentinel (never the zero vector).
pub fn hashed_bow_embedding(text: &str, dim: usize) -> Vec<f32> {
    let mut acc = vec![0.0f64; dim];
    for token in word_tokens(text) {
        let h = splitmix64(fnv1a_64(token.as_bytes()) ^ EMBED_SALT);
        let idx = (h % dim as u64) as usize;
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        acc[idx] += sign;
    }
    let norm = acc.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        let mut sentinel = vec![0.0f32; dim];
        sentinel[0] = 1.0;
        return sentinel;
    }
    acc.into_iter().map(|x| (x / norm) as f32).collect()
}

/// Every fenced JSON object/array in the prompt, in order of appearance.
fn fenced_inputs(prompt: &str) -> Vec<Value> {
    let mut out = Vec::new();
    let mut rest = prompt;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        let Some(close) = after.find("```") else { break };
        let mut body = &after[..close];
        if let Some(nl) = body.find('\n') {
            let tag = body[..nl].trim();
            if !tag.is_empty() && tag.chars().all(|c| c.is_ascii_alphanumeric()) {
                body = &body[nl + 1..];
            }
        }
        if let Ok(v) = serde_json::from_str::<Value>(body.trim()) {
            out.push(v);
        }
        rest = &after[close + 3..];
    }
    out
}

fn block_with_key<'a>(inputs: &'a [Value], key: &str) -> Option<&'a Map<String, Value>> {
    inputs
        .iter()
        .filter_map(Value::as_object)
        .find(|m| m.contains_key(key))
}

/// Parse "at least {n} events" out of the seed-event prompt.
fn requested_event_count(prompt: &str) -> Option<usize> {
    let idx = prompt.find("at least ")?;
    let rest = &prompt[idx + "at least ".len()..];
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut parts = Vec::with_capacity(words);
    for _ in 0..words {
        parts.push(pick(rng, &LEXICON));
    }
    let mut s = parts.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

fn paragraph(rng: &mut ChaCha8Rng, sentences: usize) -> String {
    (0..sentences)
        .map(|_| { let n = rng.gen_range(6..14); sentence(rng, n) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn full_name(rng: &mut ChaCha8Rng) -> (String, String, String) {
    let given = pick(rng, &FIRST_NAMES).to_string();
    let surname = pick(rng, &LAST_NAMES).to_string();
    (format!("{given} {surname}"), given, surname)
}

fn timestamp(rng: &mut ChaCha8Rng) -> NaiveDateTime {
    let base = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    base + Duration::days(rng.gen_range(0..730))
        + Duration::hours(rng.gen_range(6..22))
        + Duration::minutes(15 * rng.gen_range(0..4))
}

fn fmt_ts(t: NaiveDateTime) -> String {
    t.format(schema::TIMESTAMP_FORMAT).to_string()
}

fn time_span(rng: &mut ChaCha8Rng) -> (String, String) {
    let start = timestamp(rng);
    let end = start + Duration::minutes(30 * rng.gen_range(1..9) as i64);
    (fmt_ts(start), fmt_ts(end))
}

fn address(rng: &mut ChaCha8Rng) -> String {
    format!("{} {}", rng.gen_range(1..900), pick(rng, &STREETS))
}

fn email_address(rng: &mut ChaCha8Rng, name: &str) -> String {
    let slug: String = name
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '.' })
        .collect();
    let domain = ["example.com", "mailbox.example", "post.example.org"][rng.gen_range(0..3)];
    format!("{slug}{}@{domain}", rng.gen_range(10..100))
}

fn event_title(rng: &mut ChaCha8Rng) -> String {
    format!("{} {}", pick(rng, &EVENT_VERBS), pick(rng, &EVENT_OBJECTS))
}

fn echo_str(input: Option<&Map<String, Value>>, key: &str) -> Option<String> {
    input?.get(key)?.as_str().map(str::to_string)
}

fn gen_profile(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let draw = block_with_key(inputs, "locale")
        .or_else(|| block_with_key(inputs, "age"))
        .cloned();
    let draw = draw.as_ref();
    let (name, given, surname) = full_name(rng);
    let friends: Vec<String> = (0..schema::FRIEND_COUNT).map(|_| full_name(rng).0).collect();
    let coworkers: Vec<String> = (0..schema::COWORKER_COUNT).map(|_| full_name(rng).0).collect();
    const RELATIONS: [&str; 7] = ["spouse", "mother", "father", "sister", "brother", "daughter", "son"];
    let family: Vec<Value> = (0..rng.gen_range(1..4))
        .map(|_| {
            let (member, _, _) = full_name(rng);
            let relation = pick(rng, &RELATIONS);
            json!({
                "name": member,
                "age": rng.gen_range(8..80).to_string(),
                "relation": relation,
                "occupation": pick(rng, &OCCUPATIONS),
                "address": address(rng),
            })
        })
        .collect();

    let mut profile = json!({
        "name": name,
        "surname": surname,
        "given_name": given,
        "nicknames": [given.to_lowercase()],
        "locale": echo_str(draw, "locale").unwrap_or_else(|| "en-US".into()),
        "timezone": echo_str(draw, "timezone").unwrap_or_else(|| pick(rng, &TIMEZONES).into()),
        "age": echo_str(draw, "age").unwrap_or_else(|| rng.gen_range(19..78).to_string()),
        "gender": echo_str(draw, "gender").unwrap_or_else(|| ["female", "male", "nonbinary"][rng.gen_range(0..3)].into()),
        "income": echo_str(draw, "income").unwrap_or_else(|| "50k-75k".into()),
        "ethnicity": echo_str(draw, "ethnicity").unwrap_or_else(|| "white".into()),
        "family_setup": echo_str(draw, "family_setup").unwrap_or_else(|| "married with children".into()),
        "nationality": echo_str(draw, "nationality").unwrap_or_else(|| "United States".into()),
        "email": email_address(rng, &given),
        "phone": format!("+1-555-{:03}-{:04}", rng.gen_range(100..999), rng.gen_range(1000..9999)),
        "eye_color": pick(rng, &schema::COLORS),
        "hair_color": pick(rng, &schema::COLORS),
        "height": format!("{} cm", rng.gen_range(150..200)),
        "weight": format!("{} kg", rng.gen_range(48..110)),
        "occupation": pick(rng, &OCCUPATIONS),
        "weekdays_routines": paragraph(rng, 3),
        "weekend_routines": paragraph(rng, 3),
        "life_events_for_holidays_and_vacations": paragraph(rng, 2),
        "family_members": family,
        "friends": friends,
        "coworkers": coworkers,
        "home_address": address(rng),
    });
    if rng.gen_bool(0.6) {
        profile["office_address"] = Value::String(address(rng));
    }
    if rng.gen_bool(0.3) {
        let classmates: Vec<String> = (0..schema::CLASSMATE_COUNT).map(|_| full_name(rng).0).collect();
        profile["classmates"] = json!(classmates);
        profile["school_address"] = Value::String(address(rng));
    }
    profile
}

fn gen_seed_event(rng: &mut ChaCha8Rng) -> Value {
    json!({
        "event": event_title(rng),
        "detailed_description": paragraph(rng, 2),
        "frequency": pick(rng, &schema::FREQUENCIES),
    })
}

fn gen_seed_events(rng: &mut ChaCha8Rng, n: usize) -> Value {
    Value::Array((0..n).map(|_| gen_seed_event(rng)).collect())
}

fn participants_from_profile(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Vec<String> {
    let Some(profile) = block_with_key(inputs, "friends") else {
        return Vec::new();
    };
    let mut pool: Vec<String> = Vec::new();
    for key in ["friends", "coworkers"] {
        if let Some(arr) = profile.get(key).and_then(Value::as_array) {
            pool.extend(arr.iter().filter_map(Value::as_str).map(str::to_string));
        }
    }
    if let Some(arr) = profile.get("family_members").and_then(Value::as_array) {
        pool.extend(
            arr.iter()
                .filter_map(|m| m.get("name").and_then(Value::as_str))
                .map(str::to_string),
        );
    }
    let take = rng.gen_range(0..3).min(pool.len());
    (0..take)
        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
        .collect()
}

fn expanded_event_from(rng: &mut ChaCha8Rng, inputs: &[Value], title: String, description: String) -> Value {
    let (start, end) = time_span(rng);
    json!({
        "event": title,
        "detailed_description": description,
        "frequency": pick(rng, &schema::FREQUENCIES),
        "location": if rng.gen_bool(0.7) { pick(rng, &VENUES).to_string() } else { String::new() },
        "other_participants": participants_from_profile(rng, inputs),
        "start_time": start,
        "end_time": end,
    })
}

fn gen_expanded_event(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let event = block_with_key(inputs, "event");
    let title = echo_str(event, "event").unwrap_or_else(|| event_title(rng));
    let description = echo_str(event, "detailed_description").unwrap_or_else(|| paragraph(rng, 2));
    let mut v = expanded_event_from(rng, inputs, title, description);
    // when reflecting or aligning, keep supplied times/frequency in place
    if let Some(m) = event {
        for key in ["frequency", "location", "start_time", "end_time", "other_participants"] {
            if let Some(val) = m.get(key) {
                v[key] = val.clone();
            }
        }
    }
    v
}

fn gen_expansion(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let children = match rng.gen_range(0..100) {
        0..=64 => 0,
        65..=84 => 1,
        85..=94 => 2,
        _ => 3,
    };
    let items: Vec<Value> = (0..children)
        .map(|_| {
            let title = event_title(rng);
            let description = paragraph(rng, 2);
            expanded_event_from(rng, inputs, title, description)
        })
        .collect();
    Value::Array(items)
}

fn gen_choice(rng: &mut ChaCha8Rng) -> Value {
    let kind = match rng.gen_range(0..100) {
        0..=44 => "email",
        45..=64 => "message_thread",
        65..=84 => "calendar_entry",
        85..=94 => "reminder",
        _ => "wallet_pass",
    };
    json!({
        "kind": kind,
        "direction": if rng.gen_bool(0.5) { "sent" } else { "received" },
    })
}

fn email_body(rng: &mut ChaCha8Rng) -> String {
    let sentences = rng.gen_range(3..9);
    let mut body = paragraph(rng, sentences);
    if rng.gen_bool(0.25) {
        body.push_str(&format!(
            " Details: https://example.com/r/{:08x}",
            rng.gen::<u32>()
        ));
    }
    body
}

fn gen_email(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let event = block_with_key(inputs, "event");
    let (sender, given, _) = full_name(rng);
    let to_name = full_name(rng).0;
    let send_time = echo_str(event, "start_time").unwrap_or_else(|| fmt_ts(timestamp(rng)));
    let subject = echo_str(event, "event")
        .map(|t| format!("Re: {t}"))
        .unwrap_or_else(|| sentence(rng, 4));
    json!({
        "sender_name": sender,
        "from_address": email_address(rng, &given),
        "to_address": email_address(rng, &to_name),
        "send_time": send_time,
        "subject": subject,
        "body": email_body(rng),
    })
}

fn gen_thread(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let profile = block_with_key(inputs, "friends");
    let me = echo_str(profile, "name").unwrap_or_else(|| full_name(rng).0);
    let other = profile
        .and_then(|m| m.get("friends"))
        .and_then(Value::as_array)
        .and_then(|a| a.first())
        .and_then(Value::as_str)
        .map(str::to_string)
        .unwrap_or_else(|| full_name(rng).0);
    let mut t = timestamp(rng);
    let count = rng.gen_range(2..6);
    let messages: Vec<Value> = (0..count)
        .map(|i| {
            let sender = if i % 2 == 0 { &me } else { &other };
            let words = rng.gen_range(4..12);
            let text = sentence(rng, words);
            let m = json!({
                "sender": sender,
                "send_time": fmt_ts(t),
                "text": text,
            });
            t += Duration::minutes(rng.gen_range(1..30));
            m
        })
        .collect();
    json!({ "participants": [me, other], "messages": messages })
}

fn gen_calendar(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let event = block_with_key(inputs, "event");
    let (fallback_start, fallback_end) = time_span(rng);
    let start = echo_str(event, "start_time").unwrap_or(fallback_start);
    let end = echo_str(event, "end_time").unwrap_or(fallback_end);
    let attendees = event
        .and_then(|m| m.get("other_participants"))
        .cloned()
        .unwrap_or_else(|| json!([]));
    let mut v = json!({
        "title": echo_str(event, "event").unwrap_or_else(|| event_title(rng)),
        "start_time": start,
        "end_time": end,
        "attendees": attendees,
    });
    if rng.gen_bool(0.7) {
        v["location"] = Value::String(
            echo_str(event, "location")
                .filter(|l| !l.is_empty())
                .unwrap_or_else(|| pick(rng, &VENUES).to_string()),
        );
    }
    v
}

fn gen_reminder(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let event = block_with_key(inputs, "event");
    let title = echo_str(event, "event")
        .map(|t| format!("Reminder: {t}"))
        .unwrap_or_else(|| format!("Reminder: {}", event_title(rng)));
    let due = echo_str(event, "start_time").unwrap_or_else(|| fmt_ts(timestamp(rng)));
    let mut v = json!({ "title": title, "due_time": due });
    if rng.gen_bool(0.5) {
        v["note"] = Value::String(sentence(rng, 6));
    }
    v
}

fn gen_pass(rng: &mut ChaCha8Rng, inputs: &[Value]) -> Value {
    let event = block_with_key(inputs, "event");
    let (fallback_from, fallback_until) = time_span(rng);
    json!({
        "pass_kind": pick(rng, &schema::PASS_KINDS),
        "title": echo_str(event, "event").unwrap_or_else(|| event_title(rng)),
        "reference_code": format!("{:06X}", rng.gen_range(0x100000..0xFFFFFFu32)),
        "valid_from": echo_str(event, "start_time").unwrap_or(fallback_from),
        "valid_until": echo_str(event, "end_time").unwrap_or(fallback_until),
    })
}

fn gen_critique(rng: &mut ChaCha8Rng) -> Value {
    if rng.gen_bool(0.75) {
        json!({ "verdict": "approve", "feedback": "" })
    } else {
        json!({
            "verdict": "revise",
            "feedback": format!("Tighten the wording: {}", sentence(rng, 8)),
        })
    }
}

fn gen_judge(rng: &mut ChaCha8Rng) -> Value {
    let mut out = Map::new();
    let mut total = 0.0;
    for axis in schema::JUDGE_AXES {
        let score = rng.gen_range(3..=5);
        total += score as f64;
        out.insert(
            axis.to_string(),
            json!({ "score": score, "explanation": sentence(rng, 7) }),
        );
    }
    let overall = (total / schema::JUDGE_AXES.len() as f64 * 10.0).round() / 10.0;
    out.insert(
        "Overall".to_string(),
        json!({ "score": overall, "summary": sentence(rng, 8) }),
    );
    Value::Object(out)
}

fn gen_outline(rng: &mut ChaCha8Rng, inputs: &[Value]) -> String {
    let event = block_with_key(inputs, "event");
    let heading = echo_str(event, "event").unwrap_or_else(|| event_title(rng));
    let mut lines = vec![format!("Outline: {heading}")];
    for _ in 0..rng.gen_range(3..6) {
        let n = rng.gen_range(5..10);
        lines.push(format!("- {}", sentence(rng, n)));
    }
    lines.join("\n")
}
