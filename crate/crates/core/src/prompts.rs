//! Prompt templates for every agent role.
//!
//! Each render function returns `(system_prompt, user_prompt)`. Structured
//! inputs are embedded as fenced JSON blocks so downstream parsing (and the
//! offline backend's echo behavior) has one unambiguous place to read them
//! from. Non-email artifact prompts reuse the email writer's framing with the
//! output contract swapped.

use crate::artifact::{ArtifactKind, Direction};
use crate::event_forest::ExpandedEvent;
use crate::persona::PersonaProfile;
use serde_json::Value;

fn fenced(value: &Value) -> String {
    format!("```json\n{value}\n```")
}

pub fn render_profile_prompt(draw_input: &Value) -> (String, String) {
    let system = "You are tasked with writing a novel that captures life in the modern world. \
Your primary task is to develop a detailed concept for your novel's protagonist, including \
specifics about their job, personal life, and social connections, presented in JSON format."
        .to_string();
    let user = format!(
        "Task requirements:\n\
1. Populate each provided field relevant to the protagonist's life, including personal characteristics and daily routines. If a specific field (e.g., classmates) does not apply to your character design, omit this field entirely.\n\
2. Any information you include must align with the initial input. If additional information is necessary and was not provided in the input, extrapolate reasonably based on the available data. Avoid placeholders such as \"not specified\".\n\
3. Choose a name for your protagonist reflecting their gender and ethnicity.\n\
4. Factor in the protagonist's income level when outlining their lifestyle, specifically their holiday and vacation activities.\n\
5. All output keys should be in English, and all values should be in the user's local language.\n\
6. The protagonist's nationality should reflect only the nationality indicated on their passport, while the protagonist's residence address must correspond to the specified locale in the input.\n\
\n\
The output must be a single JSON object with these fields: name, surname, given_name, middle_name (omit if inapplicable), nicknames, locale, timezone, age (string), gender, income, ethnicity, family_setup, nationality, email, phone, eye_color (one of [black, blue, brown, gold, gray, green, silver, white]), hair_color (same options), height, weight, occupation, weekdays_routines, weekend_routines, life_events_for_holidays_and_vacations, family_members (list of objects with name, age, relation, occupation, address), friends (list of five friends' names), coworkers (list of eight coworkers' names), classmates (if applicable, list of ten classmates' names), home_address, office_address (omit if inapplicable), school_address (omit if inapplicable).\n\
\n\
Input:\n{}",
        fenced(draw_input)
    );
    (system, user)
}

pub fn render_seed_events_prompt(profile_digest: &Value, num_seed_events: usize) -> (String, String) {
    let system = "You are an imaginative planner who brainstorms the everyday events a person \
might experience, given their profile.".to_string();
    let user = format!(
        "Task: Brainstorm possible events based on the profile. Consider all possibilities, and generate at least {num_seed_events} events as comprehensive and diverse as possible.\n\
\n\
Tips for brainstorming:\n\
- Analyze lifestyle: identify daily, weekly, and seasonal patterns across work, hobbies, social life, and personal responsibilities.\n\
- Consider recent life: reflect on important events in the past two years.\n\
- Incorporate professional and personal roles: include work-related tasks and personal interests.\n\
- Account for special occasions and holidays: traditions, family gatherings, vacations, birthdays, anniversaries, cultural events.\n\
- Think about common responsibilities: financial management and household chores.\n\
- Consider social and recreational activities: interactions with family, friends, and coworkers; leisure such as travel, hobbies, or fitness.\n\
- Factor in unexpected and rare events: emergencies (medical visits, car repairs), special projects, one-time commitments.\n\
\n\
Output format: a JSON list of objects, each with fields:\n\
- event: a clear and specific event title.\n\
- detailed_description: a comprehensive explanation of the event for consistency and coherence.\n\
- frequency: one of [\"daily\", \"weekly\", \"monthly\", \"seasonally\", \"yearly\", \"once\"].\n\
\n\
Input:\n{}",
        fenced(profile_digest)
    );
    (system, user)
}

pub fn render_alignment_prompt(seed: &Value, profile: &Value) -> (String, String) {
    let system = "You specialize in adapting generic life events to a specific person, modifying \
event descriptions as needed so they fit the person's job, relationships, and routines."
        .to_string();
    let user = format!(
        "Align the seed event below with the profile. Keep the activity recognizable but make every \
detail consistent with the person. Select other_participants only from names in the profile. \
Output one JSON object with fields: event, detailed_description, frequency (one of [\"daily\", \
\"weekly\", \"monthly\", \"seasonally\", \"yearly\", \"once\"]), location (a realistic and precise \
address suitable for a calendar entry, or blank if the event could take place in multiple places), \
other_participants (list of names from the profile, possibly empty), start_time (RFC3339 format \
without a time zone), end_time (same format).\n\
\n\
Seed event:\n{}\n\nProfile:\n{}",
        fenced(seed),
        fenced(profile)
    );
    (system, user)
}

pub fn render_expansion_prompt(event: &Value, profile: &Value) -> (String, String) {
    let system = "You break a life event into the finer-grained events that surround it, \
ensuring temporal and causal consistency.".to_string();
    let user = format!(
        "You will receive a JSON object representing an event with the fields: event, \
detailed_description, frequency, location, other_participants, start_time, end_time.\n\
\n\
Your task: analyze the event and brainstorm relevant events as comprehensively as possible. Tips:\n\
- Think of all possible variations: different circumstances, methods, and subcategories.\n\
- Consider different perspectives: personal, professional, logistical, and financial angles.\n\
- Include decision points and contingencies: what happens if something goes wrong; common problems and solutions.\n\
- Cover tools, resources, and external interactions: necessary tools and the people involved.\n\
\n\
If the event is atomic, output an empty list. Otherwise output a JSON list of event objects with the same \
fields: event, detailed_description, frequency (one of [\"daily\", \"weekly\", \"monthly\", \
\"seasonally\", \"yearly\", \"once\"]), location (blank if no single venue fits; you can reference \
locations from the profile or suggest reasonable alternatives), other_participants (names from the \
profile only; blank if none), start_time and end_time (RFC3339 format without a time zone).\n\
\n\
Input:\n{}\n\nProfile:\n{}",
        fenced(event),
        fenced(profile)
    );
    (system, user)
}

pub fn render_reflection_prompt(event: &Value, profile: &Value) -> (String, String) {
    let system = "You review a planned event for quality: sufficient detail, logical structure, \
and whether it would plausibly leave digital records (messages, bookings, confirmations)."
        .to_string();
    let user = format!(
        "Review the event below against the profile. If it already provides sufficient detail, \
follows a logical structure, and is likely to result in digital records, return it unchanged. \
Otherwise revise it. Output one JSON object with the fields: event, detailed_description, \
frequency, location, other_participants, start_time, end_time (RFC3339 format without a time zone).\n\
\n\
Event:\n{}\n\nProfile:\n{}",
        fenced(event),
        fenced(profile)
    );
    (system, user)
}

pub fn render_choice_prompt(event: &Value) -> (String, String) {
    let system = "You decide which digital record an event would most plausibly leave behind."
        .to_string();
    let user = format!(
        "Given the event below, pick the single most plausible digital artifact it would produce \
and whether the persona sent or received it. Output one JSON object with fields: kind (one of \
[\"email\", \"message_thread\", \"calendar_entry\", \"reminder\", \"wallet_pass\"]) and direction \
(one of [\"sent\", \"received\"]).\n\nEvent:\n{}",
        fenced(event)
    );
    (system, user)
}

pub fn render_outline_prompt(event: &Value, full_name: &str, direction: Direction) -> (String, String) {
    let system = "You are a specialist in creating emails. You will be provided with a JSON object \
representing an event.".to_string();
    let sent_or_received = match direction {
        Direction::Sent => "sent",
        Direction::Received => "received",
    };
    let user = format!(
        "Your objective is to generate a realistic outline for the body of the email that \
{full_name} {sent_or_received}.\n\
\n\
Event details (JSON):\n{}\n\
\n\
Note: some fields are guaranteed to be present (event, detailed_description, start_time, end_time, \
location, other_participants), while others are optional and should only be used if relevant.\n\
\n\
Instructions:\n\
1. Output a detailed outline (not a fully written email) of the sender's email.\n\
2. You do not need to use all JSON fields, just those that make sense for the context of the email.\n\
3. Highlight any actions, requests, or follow-up details needed from the recipients.\n\
4. Choose an appropriate tone suitable for the event context.\n\
5. Do not include placeholder text. Instead, use actual data or reasonable, context-based values.\n\
6. You may include additional resources or references, if applicable.\n\
\n\
Final deliverable: a structured outline (headings and bullet points) of the email body that \
{full_name} {sent_or_received}, reflecting the sender's viewpoint.\n\
\n\
Outline:",
        fenced(event)
    );
    (system, user)
}

fn artifact_contract(kind: ArtifactKind) -> &'static str {
    match kind {
        ArtifactKind::Email => {
            "a JSON object with these keys: sender_name (the name of the sender), from_address \
(the sender's email address), to_address (the receiver's email address), send_time (the time the \
email is sent in RFC3339 format without a time zone), subject (a concise and relevant subject \
line), body (the complete email body text, following the outline)"
        }
        ArtifactKind::MessageThread => {
            "a JSON object with these keys: participants (at least two names, the persona first), \
messages (an ordered list of objects with sender — one of the participants —, send_time in RFC3339 \
format without a time zone, non-decreasing across the list, and text)"
        }
        ArtifactKind::CalendarEntry => {
            "a JSON object with these keys: title, start_time and end_time (RFC3339 format without \
a time zone, start before end), location (optional), attendees (a list of names)"
        }
        ArtifactKind::Reminder => {
            "a JSON object with these keys: title, due_time (RFC3339 format without a time zone), \
note (optional)"
        }
        ArtifactKind::WalletPass => {
            "a JSON object with these keys: pass_kind (one of [\"boarding_pass\", \"ticket\", \
\"membership\", \"coupon\"]), title, reference_code, valid_from and valid_until (RFC3339 format \
without a time zone, valid_from before valid_until)"
        }
    }
}

fn medium_plural(kind: ArtifactKind) -> &'static str {
    match kind {
        ArtifactKind::Email => "emails",
        ArtifactKind::MessageThread => "text message threads",
        ArtifactKind::CalendarEntry => "calendar invitations",
        ArtifactKind::Reminder => "reminders",
        ArtifactKind::WalletPass => "wallet passes",
    }
}

fn medium_singular(kind: ArtifactKind) -> &'static str {
    match kind {
        ArtifactKind::Email => "email",
        ArtifactKind::MessageThread => "text message thread",
        ArtifactKind::CalendarEntry => "calendar invitation",
        ArtifactKind::Reminder => "reminder",
        ArtifactKind::WalletPass => "wallet pass",
    }
}

pub fn render_artifact_prompt(
    kind: ArtifactKind,
    outline: &str,
    event: &Value,
    profile_digest: &Value,
) -> (String, String) {
    let system = format!(
        "You are a specialist in writing {}. You will be provided with an outline along with \
additional reference content. Your job is to craft a realistic, engaging, and well-structured \
{} based on the outline.",
        medium_plural(kind),
        medium_singular(kind)
    );
    let user = format!(
        "Instructions:\n\
- Use the outline as the framework for the content.\n\
- Incorporate relevant details from the event reference to enhance the content; the fields always \
present are event, detailed_description, start_time, end_time, location, other_participants. Use \
only the fields that make the result clear and effective.\n\
- Choose a tone that matches the context of the event and the intended recipients.\n\
- Organize the content into clear sections based on the outline.\n\
- Only include information that directly contributes to the purpose; you may add extra details \
that complement the outline and reference material if needed.\n\
\n\
The final output must be {}.\n\
\n\
Outline:\n{}\n\nAdditional references:\n{}\n\nPersona:\n{}",
        artifact_contract(kind),
        outline,
        fenced(event),
        fenced(profile_digest)
    );
    (system, user)
}

pub fn render_review_prompt(axis_focus: &str, artifact: &Value, event: &Value, profile_digest: &Value) -> (String, String) {
    let system = "You are an expert in email review and writing. I will provide you with an email, \
and I need you to offer detailed, constructive feedback to help improve it.".to_string();
    let user = format!(
        "Review focus: {axis_focus}.\n\
\n\
Here is the artifact for review:\n{}\n\
\n\
Context event:\n{}\n\nPersona:\n{}\n\
\n\
Output one JSON object with fields: verdict (\"approve\" if the artifact passes this review focus, \
\"revise\" otherwise) and feedback (specific, constructive suggestions; required when the verdict \
is \"revise\").",
        fenced(artifact),
        fenced(event),
        fenced(profile_digest)
    );
    (system, user)
}

pub fn render_revision_prompt(kind: ArtifactKind, original: &Value, suggestions: &str) -> (String, String) {
    let medium = medium_singular(kind);
    let system = format!(
        "You are an expert at revising {}. You will be provided with an original {medium} and a \
set of suggestions on how to improve it.",
        medium_plural(kind)
    );
    let user = format!(
        "Objective: transform the original {medium} into a new version that incorporates the given \
suggestions. Retain any key information from the original. The final output must strictly be {}. \
Do not add any additional keys.\n\
\n\
Original:\n{}\n\nSuggestions:\n{}",
        artifact_contract(kind),
        fenced(original),
        suggestions
    );
    (system, user)
}

pub fn render_judge_prompt(email: &str) -> (String, String) {
    let system = "You are an expert evaluator for synthetic communication data.".to_string();
    let user = format!(
        "Your task is to evaluate the following email based on multiple quality dimensions. \
Carefully read the email content and provide structured ratings and feedback.\n\
\n\
Evaluation dimensions:\n\
1. Tone — Is the tone appropriate for the context? Is it consistent throughout the email? Is it aligned with the intended audience?\n\
2. Fluency — Is the writing smooth and grammatically correct? Does it sound natural to read?\n\
3. Coherence — Are the ideas logically connected? Is the email easy to follow?\n\
4. Informativeness — Does the text provide useful, accurate, and complete information? Does it avoid missing or misleading details?\n\
5. Engagement — Does the text capture and maintain the reader's attention? Does it encourage the reader to take action if needed?\n\
\n\
Scoring guideline (for each dimension):\n\
5 = Excellent: fully meets requirements, no issues.\n\
4 = Good: mostly meets requirements, with minor flaws.\n\
3 = Fair: some issues present, partially acceptable.\n\
2 = Poor: major issues, mostly unacceptable.\n\
1 = Very Poor: completely fails the requirement, unusable.\n\
\n\
Output requirements: give a 1-5 score for each dimension with a short explanation (1-2 sentences). \
Provide an overall evaluation with an overall score (average or holistic). Use JSON format for the \
output, with keys Tone, Fluency, Coherence, Informativeness, Engagement (each an object with score \
and explanation) and Overall (an object with score and summary).\n\
\n\
input: {email}"
    );
    (system, user)
}

/// Compact profile view threaded into event/artifact prompts: enough context
/// to stay consistent without resending the entire profile every call.
pub fn profile_digest(profile: &PersonaProfile) -> Value {
    serde_json::json!({
        "name": profile.name,
        "email": profile.email,
        "locale": profile.locale,
        "timezone": profile.timezone,
        "age": profile.age,
        "gender": profile.gender,
        "occupation": profile.occupation,
        "weekdays_routines": profile.weekdays_routines,
        "weekend_routines": profile.weekend_routines,
        "life_events_for_holidays_and_vacations": profile.life_events_for_holidays_and_vacations,
        "home_address": profile.home_address,
        "family_members": profile.family_members,
        "friends": profile.friends,
        "coworkers": profile.coworkers,
        "classmates": profile.classmates,
    })
}

/// The retrieval query: what the persona does all day, as one string.
pub fn profile_query_digest(profile: &PersonaProfile) -> String {
    format!(
        "{} {} {}",
        profile.occupation, profile.weekdays_routines, profile.weekend_routines
    )
}

pub fn event_to_value(event: &ExpandedEvent) -> Value {
    serde_json::to_value(event).expect("event serializes")
}
