use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cremona::minimize::{
    brute_force_min_oracle, brute_force_min_oracle_seq, dejonquieres_reduction, dejonquieres_reduction_seq,
};
use cremona::model::Model;
use cremona::systems::PlaneSystem;

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    for (name, s, depth, aux) in [
        ("L(6;2^3) d3", PlaneSystem::general(6, &[2, 2, 2]), 3, 0),
        ("L(7;3,2^4) d3a1", PlaneSystem::general(7, &[3, 2, 2, 2, 2]), 3, 1),
        ("L(9;4,3^3,2) d3a2", PlaneSystem::general(9, &[4, 3, 3, 3, 2]), 3, 2),
    ] {
        g.bench_with_input(BenchmarkId::new("parallel", name), &s, |b, s| {
            b.iter(|| brute_force_min_oracle(black_box(s), depth, aux).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", name), &s, |b, s| {
            b.iter(|| brute_force_min_oracle_seq(black_box(s), depth, aux).unwrap())
        });
    }
    g.finish();
}

/// `base` pushed up by a quadratic map at its heaviest point and two points
/// infinitely near it, which a de Jonquieres map undoes.
fn inflated(d: i64, m: &[i64]) -> PlaneSystem {
    let mut model = Model::from_plane(&PlaneSystem::general(d, m)).unwrap();
    let g1 = model.add_infinitely_near(0, &[0]);
    let g2 = model.add_infinitely_near(g1, &[0]);
    model.quadratic(0, g1, g2).unwrap();
    model.to_plane(0, true).unwrap()
}

fn reduction(c: &mut Criterion) {
    let mut g = c.benchmark_group("dejonquieres_reduction");
    for (name, s) in [
        ("L(7;3,2^2) inflated", inflated(7, &[3, 2, 2])),
        ("L(10;4,3^3,2^2) inflated", inflated(10, &[4, 3, 3, 3, 2, 2])),
    ] {
        g.bench_with_input(BenchmarkId::new("parallel", name), &s, |b, s| {
            b.iter(|| dejonquieres_reduction(black_box(s)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sequential", name), &s, |b, s| {
            b.iter(|| dejonquieres_reduction_seq(black_box(s)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, oracle, reduction);
criterion_main!(benches);
