//! Property tests for the library's cross-cutting invariants.

use chrono::NaiveDateTime;
use footprints_core::artifact::{
    Artifact, ArtifactPayload, CalendarEntry, Direction, EmailArtifact, MessageThread, PassKind,
    Reminder, ThreadMessage, WalletPass,
};
use footprints_core::event_memory::{dedup, Frequency, MemoryParams, SeedEvent};
use footprints_core::footprint::ArtifactEnvelope;
use footprints_core::gateway::EmbeddingVector;
use footprints_core::metrics;
use footprints_core::minhash::{estimate_jaccard, minhash_signature};
use footprints_core::NodeId;
use proptest::prelude::*;

fn ts_strategy() -> impl Strategy<Value = NaiveDateTime> {
    // seconds across 2023-2026
    (1_672_531_200i64..1_796_200_000).prop_map(|secs| {
        chrono::DateTime::from_timestamp(secs, 0)
            .expect("in range")
            .naive_utc()
    })
}

fn text_strategy() -> impl Strategy<Value = String> {
    // printable-ish text with separators that stress escaping
    proptest::string::string_regex("[a-zA-Z0-9 ,;:\\\\café✓\\n-]{1,60}")
        .expect("valid regex")
        .prop_map(|s| if s.trim().is_empty() { "x".to_string() } else { s })
}

fn email_strategy() -> impl Strategy<Value = ArtifactPayload> {
    (text_strategy(), ts_strategy(), text_strategy(), text_strategy()).prop_map(
        |(name, t, subject, body)| {
            ArtifactPayload::Email(EmailArtifact {
                sender_name: name,
                from_address: "a@example.com".into(),
                to_address: "b@example.org".into(),
                send_time: t,
                subject,
                body,
            })
        },
    )
}

fn thread_strategy() -> impl Strategy<Value = ArtifactPayload> {
    (ts_strategy(), proptest::collection::vec(text_strategy(), 1..6)).prop_map(|(start, texts)| {
        let participants = vec!["Ana Weber".to_string(), "Hugo Rossi".to_string()];
        let messages = texts
            .into_iter()
            .enumerate()
            .map(|(i, text)| ThreadMessage {
                sender: participants[i % 2].clone(),
                send_time: start + chrono::Duration::minutes(i as i64),
                text,
            })
            .collect();
        ArtifactPayload::MessageThread(MessageThread {
            participants,
            messages,
        })
    })
}

fn calendar_strategy() -> impl Strategy<Value = ArtifactPayload> {
    (text_strategy(), ts_strategy(), 0i64..600, proptest::option::of(text_strategy())).prop_map(
        |(title, start, minutes, location)| {
            ArtifactPayload::CalendarEntry(CalendarEntry {
                title,
                start_time: start,
                end_time: start + chrono::Duration::minutes(minutes),
                location,
                attendees: vec!["Ana Weber".into()],
            })
        },
    )
}

fn reminder_strategy() -> impl Strategy<Value = ArtifactPayload> {
    (text_strategy(), ts_strategy(), proptest::option::of(text_strategy())).prop_map(
        |(title, due, note)| {
            ArtifactPayload::Reminder(Reminder {
                title,
                due_time: due,
                note,
            })
        },
    )
}

fn pass_strategy() -> impl Strategy<Value = ArtifactPayload> {
    (
        prop_oneof![
            Just(PassKind::BoardingPass),
            Just(PassKind::Ticket),
            Just(PassKind::Membership),
            Just(PassKind::Coupon)
        ],
        text_strategy(),
        ts_strategy(),
        0i64..10_000,
    )
        .prop_map(|(pass_kind, title, from, minutes)| {
            ArtifactPayload::WalletPass(WalletPass {
                pass_kind,
                title,
                reference_code: "REF123".into(),
                valid_from: from,
                valid_until: from + chrono::Duration::minutes(minutes),
            })
        })
}

fn artifact_strategy() -> impl Strategy<Value = Artifact> {
    (
        prop_oneof![
            email_strategy(),
            thread_strategy(),
            calendar_strategy(),
            reminder_strategy(),
            pass_strategy()
        ],
        0u32..50,
        prop_oneof![Just(Direction::Sent), Just(Direction::Received)],
    )
        .prop_map(|(payload, event, direction)| Artifact {
            event_id: NodeId(event),
            direction,
            payload,
        })
}

fn embedding_matrix(n: std::ops::Range<usize>, dim: std::ops::Range<usize>) -> impl Strategy<Value = Vec<EmbeddingVector>> {
    (n, dim).prop_flat_map(|(n, dim)| {
        proptest::collection::vec(
            proptest::collection::vec(-1.0f32..1.0, dim..dim + 1),
            n..n + 1,
        )
        .prop_map(|rows| {
            rows.into_iter()
                .map(|values| EmbeddingVector {
                    values,
                    provider_id: "prop".into(),
                })
                .collect()
        })
    })
}

fn seed_events(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<SeedEvent>> {
    proptest::collection::vec(
        (0usize..12, proptest::collection::vec(0usize..40, 3..12)).prop_map(|(title, toks)| {
            SeedEvent {
                event: format!("event {title}"),
                detailed_description: toks
                    .iter()
                    .map(|t| format!("tok{t}"))
                    .collect::<Vec<_>>()
                    .join(" "),
                frequency: Frequency::Weekly,
            }
        }),
        n,
    )
}

/// Brute-force oracles, independent of the library implementations.
mod oracle {
    use footprints_core::gateway::EmbeddingVector;

    pub fn pearson_mean(embeddings: &[EmbeddingVector]) -> f64 {
        let n = embeddings.len();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                total += pearson(&embeddings[i].values, &embeddings[j].values);
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    pub fn pearson(a: &[f32], b: &[f32]) -> f64 {
        let d = a.len() as f64;
        let ma = a.iter().map(|&x| x as f64).sum::<f64>() / d;
        let mb = b.iter().map(|&x| x as f64).sum::<f64>() / d;
        let mut num = 0.0;
        let mut da = 0.0;
        let mut db = 0.0;
        for k in 0..a.len() {
            let xa = a[k] as f64 - ma;
            let xb = b[k] as f64 - mb;
            num += xa * xb;
            da += xa * xa;
            db += xb * xb;
        }
        num / (da.sqrt() * db.sqrt())
    }

    pub fn cosine_distance_mean(embeddings: &[EmbeddingVector]) -> f64 {
        let n = embeddings.len();
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                total += cosine_distance(&embeddings[i].values, &embeddings[j].values);
                pairs += 1;
            }
        }
        total / pairs as f64
    }

    pub fn cosine_distance(a: &[f32], b: &[f32]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
        let na: f64 = a.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
        1.0 - dot / (na * nb)
    }
}

/// Reject matrices the metric preconditions exclude: constant-coordinate or
/// zero-norm vectors.
fn well_formed(embeddings: &[EmbeddingVector]) -> bool {
    embeddings.iter().all(|e| {
        let first = e.values[0];
        e.values.iter().any(|&x| x != first) && e.values.iter().any(|&x| x != 0.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jsonl_envelope_round_trip_is_lossless(artifact in artifact_strategy()) {
        let envelope = ArtifactEnvelope::from_artifact("persona_test", &artifact);
        let line = serde_json::to_string(&envelope).unwrap();
        let back: ArtifactEnvelope = serde_json::from_str(&line).unwrap();
        let restored = back.to_artifact().unwrap();
        prop_assert_eq!(restored, artifact);
    }

    #[test]
    fn dedup_is_idempotent_and_order_preserving(events in seed_events(0..25)) {
        let params = MemoryParams::default();
        let once = dedup(&events, 0.8, &params);
        let twice = dedup(&once, 0.8, &params);
        prop_assert_eq!(&once, &twice);
        // retained events appear in input order
        let mut cursor = 0;
        for kept in &once {
            let pos = events[cursor..].iter().position(|e| e == kept);
            prop_assert!(pos.is_some(), "retained event out of input order");
            cursor += pos.unwrap() + 1;
        }
    }

    #[test]
    fn jaccard_estimate_is_symmetric_and_reflexive(
        a in proptest::collection::vec(0usize..60, 1..30),
        b in proptest::collection::vec(0usize..60, 1..30),
    ) {
        let text = |toks: &[usize]| toks.iter().map(|t| format!("tok{t}")).collect::<Vec<_>>().join(" ");
        let sa = minhash_signature(&text(&a), 64, 3).unwrap();
        let sb = minhash_signature(&text(&b), 64, 3).unwrap();
        prop_assert_eq!(estimate_jaccard(&sa, &sb).unwrap(), estimate_jaccard(&sb, &sa).unwrap());
        prop_assert_eq!(estimate_jaccard(&sa, &sa).unwrap(), 1.0);
    }

    #[test]
    fn entropy_respects_grid_bounds(embeddings in embedding_matrix(2..40, 2..10)) {
        let h = metrics::entropy_grid(&embeddings).unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (25.0f64).ln() + 1e-12);
    }

    #[test]
    fn metrics_match_oracles(embeddings in embedding_matrix(2..20, 3..12)) {
        prop_assume!(well_formed(&embeddings));
        let corr = metrics::pairwise_correlation(&embeddings).unwrap();
        prop_assert!((corr - oracle::pearson_mean(&embeddings)).abs() < 1e-9);
        let clique = metrics::remote_clique(&embeddings).unwrap();
        prop_assert!((clique - oracle::cosine_distance_mean(&embeddings)).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&corr));
        prop_assert!((0.0..=2.0).contains(&clique));
    }

    /// Duplicating the corpus *medoid* (the provable reading of the
    /// duplicates-reduce-diversity intuition) never increases remote-clique
    /// and never decreases pairwise correlation. Arbitrary-document
    /// duplication does not satisfy this (an outlier's duplicate raises the
    /// mean pairwise distance), so the medoid is chosen per metric.
    #[test]
    fn duplicating_the_medoid_is_monotone(embeddings in embedding_matrix(3..16, 3..10)) {
        prop_assume!(well_formed(&embeddings));
        let n = embeddings.len();

        let clique_before = metrics::remote_clique(&embeddings).unwrap();
        let medoid = (0..n)
            .min_by(|&a, &b| {
                let da: f64 = (0..n).filter(|&j| j != a)
                    .map(|j| oracle::cosine_distance(&embeddings[a].values, &embeddings[j].values)).sum();
                let db: f64 = (0..n).filter(|&j| j != b)
                    .map(|j| oracle::cosine_distance(&embeddings[b].values, &embeddings[j].values)).sum();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        let mut with_dup = embeddings.clone();
        with_dup.push(embeddings[medoid].clone());
        let clique_after = metrics::remote_clique(&with_dup).unwrap();
        prop_assert!(clique_after <= clique_before + 1e-12,
            "remote_clique rose from {clique_before} to {clique_after}");

        let corr_before = metrics::pairwise_correlation(&embeddings).unwrap();
        let central = (0..n)
            .max_by(|&a, &b| {
                let ca: f64 = (0..n).filter(|&j| j != a)
                    .map(|j| oracle::pearson(&embeddings[a].values, &embeddings[j].values)).sum();
                let cb: f64 = (0..n).filter(|&j| j != b)
                    .map(|j| oracle::pearson(&embeddings[b].values, &embeddings[j].values)).sum();
                ca.partial_cmp(&cb).unwrap()
            })
            .unwrap();
        let mut with_dup = embeddings.clone();
        with_dup.push(embeddings[central].clone());
        let corr_after = metrics::pairwise_correlation(&with_dup).unwrap();
        prop_assert!(corr_after >= corr_before - 1e-12,
            "pairwise_correlation fell from {corr_before} to {corr_after}");
    }
}
