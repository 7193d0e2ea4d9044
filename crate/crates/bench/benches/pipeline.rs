use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ec_bench::{fixture, polygon};
use ec_core::word::reduced_words;
use ec_core::{
    build_cover, fold, oracle_classes, probe_injectivity, run_tower, smith_normal_form, Family, IntMatrix,
    PresentationAtScale, ScaleGraph, TowerConfig, Word,
};

fn scale_graph(c: &mut Criterion) {
    let mut group = c.benchmark_group("scale_graph");
    for level in 1..=3 {
        let family = Family::GasketLevel { level };
        let space = fixture(family);
        let eps = family.reference_scale().unwrap();
        group.bench_with_input(BenchmarkId::new("gasket", level), &eps, |b, &eps| {
            b.iter(|| ScaleGraph::new(space.clone(), black_box(eps)))
        });
    }
    group.finish();
}

fn presentation(c: &mut Criterion) {
    let mut group = c.benchmark_group("present_and_simplify");
    group.sample_size(10);
    for family in [Family::GasketLevel { level: 3 }, Family::CarpetLevel { level: 2 }] {
        let graph = Arc::new(ScaleGraph::new(fixture(family), family.reference_scale().unwrap()));
        group.bench_function(family.to_string(), |b| {
            b.iter(|| PresentationAtScale::new(graph.clone()).simplify(64).rank())
        });
    }
    group.finish();
}

fn tower(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower");
    group.sample_size(10);
    for family in [Family::HawaiianStage { level: 3 }, Family::GasketLevel { level: 2 }] {
        let space = fixture(family);
        let schedule = family.reference_schedule().unwrap();
        group.bench_function(family.to_string(), |b| {
            b.iter(|| run_tower(space.clone(), &schedule, &TowerConfig::default()).unwrap().stabilization)
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let graph = ScaleGraph::new(polygon(6), 1.2);
    c.bench_function("oracle/hexagon maxlen 8", |b| {
        b.iter(|| oracle_classes(&graph, 0, black_box(8), 1_000_000).unwrap().len())
    });
}

fn cover(c: &mut Criterion) {
    let pres = PresentationAtScale::new(Arc::new(ScaleGraph::new(fixture(Family::HawaiianStage { level: 2 }), 0.125)));
    let sim = pres.simplify(64);
    c.bench_function("cover/earring(2) radius 40", |b| {
        b.iter(|| build_cover(&pres, &sim, black_box(40)).unwrap().len())
    });
}

fn folding(c: &mut Criterion) {
    let words: Vec<Word> = reduced_words(3, 4).into_iter().filter(|w| w.len() == 4).take(60).collect();
    c.bench_function("fold/60 words of length 4", |b| b.iter(|| fold(black_box(&words), 3).states()));
    let images = vec![Word::generator(0), Word::generator(1), Word::generator(0).mul(&Word::generator(1))];
    c.bench_function("probe/rank 3 length 6", |b| b.iter(|| probe_injectivity(black_box(&images), 6, 1 << 20)));
}

fn smith(c: &mut Criterion) {
    // Deterministic dense matrix with small entries.
    let rows: Vec<Vec<i64>> = (0..24).map(|i| (0..24).map(|j| ((i * 7 + j * 13) % 11) as i64 - 5).collect()).collect();
    let m = IntMatrix::from_rows(&rows);
    c.bench_function("snf/24x24 with transforms", |b| b.iter(|| smith_normal_form(black_box(&m), true).rank()));
}

criterion_group!(benches, scale_graph, presentation, tower, oracle, cover, folding, smith);
criterion_main!(benches);
