use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use quasirand::metrics::edge_discrepancy_exact;
use quasirand::reductions::{amplify_discrepancy, AmplifyOptions, DoubledCountTable};
use quasirand::spectral::adjacency_eigenvalues;
use quasirand::{generate, hom_count, ConstraintTuple, GeneratorSpec, Graph, Pattern, VertexSet};

fn host(n: usize) -> Graph {
    generate(&GeneratorSpec::erdos_renyi(n, 0.5, 7)).unwrap()
}

fn bench_hom_count(c: &mut Criterion) {
    let mut group = c.benchmark_group("hom_count");
    for n in [64usize, 128, 256] {
        let g = host(n);
        for (name, h) in [("K3", Pattern::k3()), ("C4", Pattern::c4())] {
            let all = ConstraintTuple::unconstrained(&h, &g);
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| hom_count(black_box(&h), black_box(&g), &all).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_edge_discrepancy(c: &mut Criterion) {
    let mut group = c.benchmark_group("edge_discrepancy_exact");
    group.sample_size(10);
    for n in [16usize, 20, 24] {
        let g = host(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| edge_discrepancy_exact(black_box(&g), 0.5).unwrap())
        });
    }
    group.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues");
    for n in [64usize, 256] {
        let g = host(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| adjacency_eigenvalues(black_box(&g)))
        });
    }
    group.finish();
}

fn bench_reductions(c: &mut Criterion) {
    let mut group = c.benchmark_group("reductions");
    group.sample_size(10);
    let g = host(64);
    group.bench_function("doubled_count_table_K3_64", |b| {
        b.iter(|| DoubledCountTable::compute(black_box(&Pattern::k3()), &g, 0.5).unwrap())
    });
    let kb = Graph::complete_bipartite(64, 64);
    let side = VertexSet::from_vertices(128, 0..64).unwrap();
    group.bench_function("amplify_K64_64", |b| {
        b.iter(|| amplify_discrepancy(&kb, 0.5, black_box(&side), &AmplifyOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_hom_count, bench_edge_discrepancy, bench_spectrum, bench_reductions);
criterion_main!(benches);
