use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qforensics::assembly::assemble;
use qforensics::backend::trace_pool;
use qforensics::extract::extract_pool;
use qforensics::{derive_coupling_map, RecognizerConfig};
use qforensics_bench::{labeled_pool, long_circuit};

fn extraction(c: &mut Criterion) {
    let circuit = long_circuit(10_000, 1);
    let cfg = RecognizerConfig::default();
    c.bench_function("extract_10k", |b| b.iter(|| derive_coupling_map(black_box(&circuit), &cfg, false)));
}

fn pools(c: &mut Criterion) {
    let (circuits, registry) = labeled_pool(180);
    let cfg = RecognizerConfig::default();
    let graphs = extract_pool(&circuits, &cfg, false);
    c.bench_function("assemble_180", |b| b.iter(|| assemble(black_box(&graphs), None)));
    c.bench_function("trace_180", |b| b.iter(|| trace_pool(black_box(&circuits), &registry, &cfg, None)));
}

criterion_group!(benches, extraction, pools);
criterion_main!(benches);
