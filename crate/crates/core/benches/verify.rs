use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use locc_core::builders::{compose_even, theorem1_protocol};
use locc_core::engine::verify_perfect_with;
use locc_core::families::{self, Family};
use locc_core::par::Exec;
use locc_core::verification::check_set_with;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_perfect");
    group.sample_size(10);
    let cases = [
        ("theorem1(7,7)", families::build_bipartite_eq1(7, 7).unwrap(), theorem1_protocol(7, 7).unwrap()),
        (
            "composeEven(4,5,4,5)",
            families::build(Family::EvenS, &[4, 5, 4, 5]).unwrap(),
            compose_even(&[4, 5, 4, 5]).unwrap(),
        ),
    ];
    for (name, set, tree) in &cases {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(*name, mode), &exec, |b, &exec| {
                b.iter(|| verify_perfect_with(black_box(tree), black_box(set), true, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn check(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_set");
    group.sample_size(10);
    let set = families::build_tripartite_g(4, 6, 8).unwrap();
    for (mode, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("G(4,6,8)", mode), &exec, |b, &exec| {
            b.iter(|| check_set_with(black_box(&set), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, verify, check);
criterion_main!(benches);
