//! Run once with default features and once with `--no-default-features`;
//! the group names carry the build so both sets of results sit side by side.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use seifert_wrt::asympt::full_expansion;
use seifert_wrt::exact::{tau_range, z_sum_mode, HMode};
use seifert_wrt::par::is_parallel;
use seifert_wrt::seifert::parse;

const M1: &str = "o;0|-1;(2,1),(3,1),(7,1)";

fn build() -> &'static str {
    if is_parallel() {
        "parallel"
    } else {
        "sequential"
    }
}

fn z_sum(c: &mut Criterion) {
    let x = parse(M1).unwrap();
    let mut g = c.benchmark_group(format!("z_sum/{}", build()));
    for r in [100i64, 1000] {
        g.bench_with_input(BenchmarkId::new("factored", r), &r, |b, &r| {
            b.iter(|| z_sum_mode(black_box(&x), r, HMode::Factored).unwrap())
        });
    }
    g.bench_with_input(BenchmarkId::new("direct", 100), &100i64, |b, &r| {
        b.iter(|| z_sum_mode(black_box(&x), r, HMode::Direct).unwrap())
    });
    g.finish();
}

fn levels(c: &mut Criterion) {
    let x = parse(M1).unwrap();
    let rs: Vec<i64> = (200..=400).step_by(4).collect();
    c.bench_function(&format!("tau_range/{}/200..400", build()), |b| {
        b.iter(|| tau_range(black_box(&x), &rs).unwrap())
    });
}

fn expansion(c: &mut Criterion) {
    let x = parse("o;0|-2;(2,1),(3,2),(5,3)").unwrap();
    c.bench_function(&format!("full_expansion/{}/N=2", build()), |b| {
        b.iter(|| full_expansion(black_box(&x), 2).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = z_sum, levels, expansion
}
criterion_main!(benches);
