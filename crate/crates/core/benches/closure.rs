//! Benchmarks for the saturation engine and the corpus check.
//!
//! `closure_batch/*` saturates a batch of independent random states —
//! sequentially, and (with the default `parallel` feature) across the rayon
//! pool. Saturation of a single state is deterministic and sequential by
//! design; the parallelism is across states, which is the dominant pattern
//! for the oracle sweeps and multi-file checking.
//!
//! Run with `cargo bench -p euclid-core`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use euclid_core::diagram::DiagramState;
use euclid_core::lang::DiagramLit;
use euclid_core::oracle::{random_model, Rng};

struct Instance {
    sorts: Vec<euclid_core::lang::Sort>,
    gamma: Vec<DiagramLit>,
}

fn make_batch(n: usize, points: usize, lines: usize, circles: usize) -> Vec<Instance> {
    let mut rng = Rng(42);
    (0..n)
        .map(|_| {
            let model = random_model(&mut rng, points, lines, circles);
            let sorts = model.sorts();
            let gamma = model
                .true_literals()
                .into_iter()
                .filter(|_| rng.below(2) == 0)
                .collect();
            Instance { sorts, gamma }
        })
        .collect()
}

fn saturate_one(inst: &Instance) -> usize {
    let mut st = DiagramState::new();
    for s in &inst.sorts {
        st.register_object(*s);
    }
    for g in &inst.gamma {
        st.add(*g);
    }
    st.saturate();
    st.facts().count()
}

fn bench_closure_batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("closure_batch");
    group.sample_size(10);
    for (label, np, nl, nc, n) in [("small", 8, 3, 1, 32), ("medium", 15, 5, 2, 16)] {
        let batch = make_batch(n, np, nl, nc);
        group.bench_with_input(BenchmarkId::new("sequential", label), &batch, |b, batch| {
            b.iter(|| {
                let total: usize = batch.iter().map(saturate_one).sum();
                std::hint::black_box(total)
            })
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", label), &batch, |b, batch| {
            use rayon::prelude::*;
            b.iter(|| {
                let total: usize = batch.par_iter().map(saturate_one).sum();
                std::hint::black_box(total)
            })
        });
    }
    group.finish();
}

fn bench_corpus(c: &mut Criterion) {
    let corpus = std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"));
    c.bench_function("corpus_check", |b| {
        b.iter(|| {
            let session = euclid_core::run::check_corpus(corpus).unwrap();
            assert!(session
                .outcomes
                .iter()
                .all(|o| o.report.as_ref().is_some_and(|r| r.all_passed())));
        })
    });
}

criterion_group!(benches, bench_closure_batch, bench_corpus);
criterion_main!(benches);
