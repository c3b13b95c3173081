use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use quasicut_bench::{cut_instance, tree, treewidth2};
use quasicut_core::cut::{solve_multicut, solve_sparsest_cut, CutOptions, SeparatorStrategy};
use quasicut_core::embedding::{build_scale_family, embed_01_combination};
use quasicut_core::graph::shortest_path_quasimetric;
use quasicut_core::partition::{SeparatorProvider, SupportBuilder, TreeBuilder, TreeSampler, TreewidthBuilder};

fn shortest_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("shortest_paths");
    for n in [16, 64, 256] {
        let g = tree(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| shortest_path_quasimetric(black_box(g)))
        });
    }
    group.finish();
}

fn tree_support(c: &mut Criterion) {
    let mut group = c.benchmark_group("tree_support");
    for n in [8, 32, 128] {
        let g = tree(n);
        let s = TreeSampler::new(&g, 4.0, 0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &s, |b, s| b.iter(|| s.support()));
    }
    group.finish();
}

fn treewidth_support(c: &mut Criterion) {
    let mut group = c.benchmark_group("treewidth_support");
    for n in [6, 12, 24] {
        let (g, td) = treewidth2(n);
        let builder = TreewidthBuilder::new(&g, &SeparatorProvider::Decomposition(td)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| builder.build(g, 4.0).unwrap()));
    }
    group.finish();
}

fn embedding(c: &mut Criterion) {
    let mut group = c.benchmark_group("zero_one_embedding");
    for n in [8, 16, 32] {
        let g = tree(n);
        let m = shortest_path_quasimetric(&g);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| embed_01_combination(&build_scale_family(&m, g, &TreeBuilder { root: 0 }).unwrap()))
        });
    }
    group.finish();
}

fn cuts(c: &mut Criterion) {
    let mut group = c.benchmark_group("cuts");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let (inst, td) = cut_instance(n);
        let opts = CutOptions { strategy: SeparatorStrategy::Decomposition(td), ..CutOptions::default() };
        group.bench_with_input(BenchmarkId::new("sparsest", n), &inst, |b, inst| {
            b.iter(|| solve_sparsest_cut(inst, &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("multicut", n), &inst, |b, inst| {
            b.iter(|| solve_multicut(inst, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, shortest_paths, tree_support, treewidth_support, embedding, cuts);
criterion_main!(benches);
