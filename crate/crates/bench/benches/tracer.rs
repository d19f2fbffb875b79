use browder_core::oracle::{Example1, Example2};
use browder_core::{build_level, label_components, trace, TraceConfig};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_build_level(c: &mut Criterion) {
    let oracle = Example1::default();
    let mut group = c.benchmark_group("build_level");
    for k in [6u32, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| build_level(&oracle, black_box(k), None).unwrap())
        });
    }
    group.finish();
}

fn bench_label_components(c: &mut Criterion) {
    let oracle = Example2::new(8).unwrap();
    let set = build_level(&oracle, 9, None).unwrap();
    c.bench_function("label_components/example2_k9", |b| b.iter(|| label_components(black_box(&set))));
}

fn bench_trace(c: &mut Criterion) {
    let oracle = Example1::default();
    let mut group = c.benchmark_group("trace_example1");
    group.sample_size(10);
    for k_max in [7u32, 9] {
        let config = TraceConfig { k_start: 2, k_max, prune: true };
        group.bench_with_input(BenchmarkId::from_parameter(k_max), &config, |b, &config| {
            b.iter(|| trace(&oracle, config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_build_level, bench_label_components, bench_trace);
criterion_main!(benches);
