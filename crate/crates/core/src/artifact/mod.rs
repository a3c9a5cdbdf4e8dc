//! Digital artifact types: the records an event leaves behind.

pub mod engine;

use crate::event_forest::{ts, NodeId};
use crate::gateway::schema::{self, SchemaId, Violation};
use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Sent,
    Received,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Email,
    MessageThread,
    CalendarEntry,
    Reminder,
    WalletPass,
}

impl ArtifactKind {
    pub fn schema(self) -> SchemaId {
        match self {
            ArtifactKind::Email => SchemaId::Email,
            ArtifactKind::MessageThread => SchemaId::MessageThread,
            ArtifactKind::CalendarEntry => SchemaId::CalendarEntry,
            ArtifactKind::Reminder => SchemaId::Reminder,
            ArtifactKind::WalletPass => SchemaId::WalletPass,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ArtifactKind::Email => "email",
            ArtifactKind::MessageThread => "message_thread",
            ArtifactKind::CalendarEntry => "calendar_entry",
            ArtifactKind::Reminder => "reminder",
            ArtifactKind::WalletPass => "wallet_pass",
        }
    }
}

/// The six-key email contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmailArtifact {
    pub sender_name: String,
    pub from_address: String,
    pub to_address: String,
    #[serde(with = "ts")]
    pub send_time: NaiveDateTime,
    pub subject: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreadMessage {
    pub sender: String,
    #[serde(with = "ts")]
    pub send_time: NaiveDateTime,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageThread {
    pub participants: Vec<String>,
    pub messages: Vec<ThreadMessage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CalendarEntry {
    pub title: String,
    #[serde(with = "ts")]
    pub start_time: NaiveDateTime,
    #[serde(with = "ts")]
    pub end_time: NaiveDateTime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
    #[serde(default)]
    pub attendees: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reminder {
    pub title: String,
    #[serde(with = "ts")]
    pub due_time: NaiveDateTime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassKind {
    BoardingPass,
    Ticket,
    Membership,
    Coupon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalletPass {
    pub pass_kind: PassKind,
    pub title: String,
    pub reference_code: String,
    #[serde(with = "ts")]
    pub valid_from: NaiveDateTime,
    #[serde(with = "ts")]
    pub valid_until: NaiveDateTime,
}

/// Exactly one variant is populated; the envelope's `kind` field names it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArtifactPayload {
    Email(EmailArtifact),
    MessageThread(MessageThread),
    CalendarEntry(CalendarEntry),
    Reminder(Reminder),
    WalletPass(WalletPass),
}

impl ArtifactPayload {
    pub fn kind(&self) -> ArtifactKind {
        match self {
            ArtifactPayload::Email(_) => ArtifactKind::Email,
            ArtifactPayload::MessageThread(_) => ArtifactKind::MessageThread,
            ArtifactPayload::CalendarEntry(_) => ArtifactKind::CalendarEntry,
            ArtifactPayload::Reminder(_) => ArtifactKind::Reminder,
            ArtifactPayload::WalletPass(_) => ArtifactKind::WalletPass,
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            ArtifactPayload::Email(x) => serde_json::to_value(x),
            ArtifactPayload::MessageThread(x) => serde_json::to_value(x),
            ArtifactPayload::CalendarEntry(x) => serde_json::to_value(x),
            ArtifactPayload::Reminder(x) => serde_json::to_value(x),
            ArtifactPayload::WalletPass(x) => serde_json::to_value(x),
        }
        .expect("payload serializes")
    }

    pub fn from_value(kind: ArtifactKind, value: Value) -> Result<Self, serde_json::Error> {
        Ok(match kind {
            ArtifactKind::Email => ArtifactPayload::Email(serde_json::from_value(value)?),
            ArtifactKind::MessageThread => {
                ArtifactPayload::MessageThread(serde_json::from_value(value)?)
            }
            ArtifactKind::CalendarEntry => {
                ArtifactPayload::CalendarEntry(serde_json::from_value(value)?)
            }
            ArtifactKind::Reminder => ArtifactPayload::Reminder(serde_json::from_value(value)?),
            ArtifactKind::WalletPass => ArtifactPayload::WalletPass(serde_json::from_value(value)?),
        })
    }

    /// Run the variant's schema validator over this payload.
    pub fn validate(&self) -> Vec<Violation> {
        schema::validate(self.kind().schema(), &self.to_value())
    }

    /// Timeline sort key: email send time; thread first message; calendar
    /// start; reminder due; pass valid-from.
    pub fn primary_timestamp(&self) -> NaiveDateTime {
        match self {
            ArtifactPayload::Email(x) => x.send_time,
            ArtifactPayload::MessageThread(x) => {
                x.messages.first().map(|m| m.send_time).unwrap_or_default()
            }
            ArtifactPayload::CalendarEntry(x) => x.start_time,
            ArtifactPayload::Reminder(x) => x.due_time,
            ArtifactPayload::WalletPass(x) => x.valid_from,
        }
    }

    /// The text a corpus evaluation treats as this artifact's document.
    pub fn document_text(&self) -> String {
        match self {
            ArtifactPayload::Email(x) => x.body.clone(),
            ArtifactPayload::MessageThread(x) => x
                .messages
                .iter()
                .map(|m| m.text.as_str())
                .collect::<Vec<_>>()
                .join("\n"),
            ArtifactPayload::CalendarEntry(x) => match &x.location {
                Some(location) => format!("{} @ {location}", x.title),
                None => x.title.clone(),
            },
            ArtifactPayload::Reminder(x) => match &x.note {
                Some(note) => format!("{} — {note}", x.title),
                None => x.title.clone(),
            },
            ArtifactPayload::WalletPass(x) => format!("{} [{}]", x.title, x.reference_code),
        }
    }
}

/// A payload tied to the event that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub event_id: NodeId,
    pub direction: Direction,
    pub payload: ArtifactPayload,
}

impl Artifact {
    pub fn kind(&self) -> ArtifactKind {
        self.payload.kind()
    }
}
