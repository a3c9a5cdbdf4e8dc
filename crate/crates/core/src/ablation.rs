//! Agent-ablated baseline: a fixed list of event types filled into frozen
//! hand-written templates. Used only by tests and the evaluate command as a
//! comparison corpus; it never touches the gateway.

use crate::artifact::{
    Artifact, ArtifactPayload, CalendarEntry, Direction, EmailArtifact, PassKind, WalletPass,
};
use crate::event_forest::NodeId;
use crate::persona::PersonaProfile;
use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The fixed event types and the slots each template fills:
///
/// - `Appointment` — time, location (calendar entry)
/// - `Bill` — time, amount, biller (received email)
/// - `OnlineShopping` — time, item, amount/order number, shipping address (received email)
/// - `TicketedShow` — time, show, reference code (wallet pass)
/// - `WorkMeeting` — time, location, participants (calendar entry)
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventTemplateKind {
    Appointment,
    Bill,
    OnlineShopping,
    TicketedShow,
    WorkMeeting,
}

impl EventTemplateKind {
    pub const ALL: [EventTemplateKind; 5] = [
        EventTemplateKind::Appointment,
        EventTemplateKind::Bill,
        EventTemplateKind::OnlineShopping,
        EventTemplateKind::TicketedShow,
        EventTemplateKind::WorkMeeting,
    ];
}

const APPOINTMENT_KINDS: [&str; 4] = ["dental", "medical", "tax advisory", "vehicle inspection"];
const SHOW_NAMES: [&str; 4] = [
    "Symphony Night",
    "Comedy Hour",
    "Spring Jazz Festival",
    "Chamber Recital",
];
const SHOP_ITEMS: [&str; 5] = [
    "running shoes",
    "desk lamp",
    "coffee beans",
    "phone case",
    "garden hose",
];
const BILLERS: [&str; 4] = ["City Utilities", "Metro Internet", "Northside Water", "GreenPower Co"];

fn slot_time(rng: &mut ChaCha8Rng) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2024, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap()
        + Duration::days(rng.gen_range(0..365))
        + Duration::hours(rng.gen_range(8..20))
}

fn received_email(
    event_id: NodeId,
    profile: &PersonaProfile,
    sender_name: &str,
    send_time: NaiveDateTime,
    subject: String,
    body: String,
) -> Artifact {
    let from_domain = sender_name
        .to_lowercase()
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>();
    Artifact {
        event_id,
        direction: Direction::Received,
        payload: ArtifactPayload::Email(EmailArtifact {
            sender_name: sender_name.to_string(),
            from_address: format!("billing@{from_domain}.example.com"),
            to_address: profile.email.clone(),
            send_time,
            subject,
            body,
        }),
    }
}

fn fill_template(
    kind: EventTemplateKind,
    event_id: NodeId,
    profile: &PersonaProfile,
    rng: &mut ChaCha8Rng,
) -> Artifact {
    let time = slot_time(rng);
    match kind {
        EventTemplateKind::Appointment => {
            let what = APPOINTMENT_KINDS[rng.gen_range(0..APPOINTMENT_KINDS.len())];
            Artifact {
                event_id,
                direction: Direction::Received,
                payload: ArtifactPayload::CalendarEntry(CalendarEntry {
                    title: format!("Appointment: {what} checkup"),
                    start_time: time,
                    end_time: time + Duration::minutes(45),
                    location: Some(format!("{} Clinic, Suite {}", what, rng.gen_range(1..40))),
                    attendees: vec![profile.name.clone()],
                }),
            }
        }
        EventTemplateKind::Bill => {
            let biller = BILLERS[rng.gen_range(0..BILLERS.len())];
            let amount = rng.gen_range(20..240);
            received_email(
                event_id,
                profile,
                biller,
                time,
                format!("Your {biller} bill is ready"),
                format!(
                    "Dear {},\n\nYour statement for this period is now available. Amount due: \
${amount}.00. Payment is due within 21 days.\n\nThank you,\n{biller} Billing",
                    profile.name
                ),
            )
        }
        EventTemplateKind::OnlineShopping => {
            let item = SHOP_ITEMS[rng.gen_range(0..SHOP_ITEMS.len())];
            let order = rng.gen_range(100000..999999);
            received_email(
                event_id,
                profile,
                "ShopDirect",
                time,
                format!("Order #{order} confirmed"),
                format!(
                    "Hello {},\n\nThanks for your purchase of {item}. Order #{order} will ship to \
{} within 3-5 business days.\n\nShopDirect Orders",
                    profile.name, profile.home_address
                ),
            )
        }
        EventTemplateKind::TicketedShow => {
            let show = SHOW_NAMES[rng.gen_range(0..SHOW_NAMES.len())];
            Artifact {
                event_id,
                direction: Direction::Received,
                payload: ArtifactPayload::WalletPass(WalletPass {
                    pass_kind: PassKind::Ticket,
                    title: format!("{show} admission"),
                    reference_code: format!("TK{:06}", rng.gen_range(0..1000000)),
                    valid_from: time,
                    valid_until: time + Duration::hours(3),
                }),
            }
        }
        EventTemplateKind::WorkMeeting => {
            let attendee = profile
                .coworkers
                .get(rng.gen_range(0..profile.coworkers.len()))
                .cloned()
                .unwrap_or_else(|| profile.name.clone());
            Artifact {
                event_id,
                direction: Direction::Received,
                payload: ArtifactPayload::CalendarEntry(CalendarEntry {
                    title: format!("Work meeting: weekly sync, room {}", rng.gen_range(1..12)),
                    start_time: time,
                    end_time: time + Duration::minutes(30),
                    location: profile.office_address.clone(),
                    attendees: vec![profile.name.clone(), attendee],
                }),
            }
        }
    }
}

/// Cycle through the fixed event kinds, filling slots from the profile and a
/// seeded stream. Pure and deterministic; the gateway is never consulted.
pub fn generate_ablated(profile: &PersonaProfile, count: usize, seed: u64) -> Vec<Artifact> {
    assert!(count > 0, "count must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let kind = EventTemplateKind::ALL[i % EventTemplateKind::ALL.len()];
            fill_template(kind, NodeId(i as u32), profile, &mut rng)
        })
        .collect()
}
