//! Minimal RFC 5545 writer for the footprint's calendar entries.
//!
//! One VEVENT per calendar entry; times are written as floating local values
//! (no zone designator), matching the pipeline's zone-less timestamp
//! contract. Consumers that need zones apply the profile's timezone
//! externally.

use super::{DigitalFootprint, FootprintError};
use crate::artifact::ArtifactPayload;
use chrono::NaiveDateTime;
use std::path::Path;

const PRODID: &str = "-//footprints//calendar export//EN";

fn ics_timestamp(t: NaiveDateTime) -> String {
    t.format("%Y%m%dT%H%M%S").to_string()
}

/// TEXT escaping per RFC 5545 §3.3.11: backslash, semicolon, comma, newline.
fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ';' => out.push_str("\\;"),
            ',' => out.push_str("\\,"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            _ => out.push(c),
        }
    }
    out
}

/// Fold a content line to <=75 octets per physical line; continuations are
/// prefixed with one space. Folding never splits a UTF-8 sequence.
fn fold_line(line: &str, out: &mut String) {
    let mut octets = 0;
    for c in line.chars() {
        let len = c.len_utf8();
        if octets + len > 74 {
            out.push_str("\r\n ");
            octets = 1; // the continuation space
        }
        out.push(c);
        octets += len;
    }
    out.push_str("\r\n");
}

/// Render the ICS document for all calendar entries in the footprint.
pub fn render_ics(footprint: &DigitalFootprint) -> (String, usize) {
    let mut body = String::new();
    fold_line("BEGIN:VCALENDAR", &mut body);
    fold_line("VERSION:2.0", &mut body);
    fold_line(&format!("PRODID:{PRODID}"), &mut body);
    let mut count = 0;
    for artifact in &footprint.artifacts {
        let ArtifactPayload::CalendarEntry(entry) = &artifact.payload else {
            continue;
        };
        count += 1;
        fold_line("BEGIN:VEVENT", &mut body);
        fold_line(
            &format!("UID:{}:{}", footprint.provenance.persona_id, artifact.event_id.0),
            &mut body,
        );
        fold_line(&format!("DTSTART:{}", ics_timestamp(entry.start_time)), &mut body);
        fold_line(&format!("DTEND:{}", ics_timestamp(entry.end_time)), &mut body);
        fold_line(&format!("SUMMARY:{}", escape_text(&entry.title)), &mut body);
        if let Some(location) = &entry.location {
            fold_line(&format!("LOCATION:{}", escape_text(location)), &mut body);
        }
        fold_line("END:VEVENT", &mut body);
    }
    fold_line("END:VCALENDAR", &mut body);
    (body, count)
}

/// Write the ICS file; returns the VEVENT count.
pub fn export_ics(footprint: &DigitalFootprint, path: &Path) -> Result<usize, FootprintError> {
    let (body, count) = render_ics(footprint);
    std::fs::write(path, body).map_err(|source| FootprintError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(count)
}
