use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use attribute_autonomy::parse_scenario;
use attribute_autonomy::sweep::{run_sweep_sequential, SweepSummary};

const SCENARIO: &str = include_str!("../scenarios/default.scn");

fn sweep(c: &mut Criterion) {
    let scenario = parse_scenario(SCENARIO).expect("bundled scenario parses");
    let mut group = c.benchmark_group("sweep");
    for runs in [100u64, 1000] {
        group.bench_with_input(BenchmarkId::new("sequential", runs), &runs, |b, &runs| {
            b.iter(|| -> SweepSummary { run_sweep_sequential(black_box(&scenario), runs, 1).unwrap() })
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("rayon", runs), &runs, |b, &runs| {
            b.iter(|| attribute_autonomy::sweep::run_sweep(black_box(&scenario), runs, 1).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
