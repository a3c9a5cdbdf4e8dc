use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use footprints_bench::seed_events;
use footprints_core::event_memory::{dedup, MemoryParams};
use footprints_core::minhash::{estimate_jaccard, minhash_signature};
use std::hint::black_box;

fn bench_signature(c: &mut Criterion) {
    let text = seed_events(1, 3)[0].text();
    let mut group = c.benchmark_group("minhash_signature");
    for k in [64usize, 128, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| minhash_signature(black_box(&text), k, 7).unwrap());
        });
    }
    group.finish();
}

fn bench_estimate(c: &mut Criterion) {
    let events = seed_events(2, 5);
    let a = minhash_signature(&events[0].text(), 256, 7).unwrap();
    let b2 = minhash_signature(&events[1].text(), 256, 7).unwrap();
    c.bench_function("estimate_jaccard_k256", |b| {
        b.iter(|| estimate_jaccard(black_box(&a), black_box(&b2)).unwrap());
    });
}

fn bench_dedup(c: &mut Criterion) {
    let mut group = c.benchmark_group("dedup");
    group.sample_size(20);
    for n in [100usize, 400] {
        let mut events = seed_events(n, 11);
        // plant ~10% duplicates
        for i in 0..n / 10 {
            events.push(events[i * 7 % n].clone());
        }
        group.bench_with_input(BenchmarkId::from_parameter(n), &events, |b, events| {
            b.iter(|| dedup(black_box(events), 0.8, &MemoryParams::default()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_signature, bench_estimate, bench_dedup);
criterion_main!(benches);
