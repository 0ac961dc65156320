use arrwwid_core::catalog::builtin;
use arrwwid_core::cover::{cover_batch, cover_fragments, MergeBudget, QueryRange};
use arrwwid_core::recursify::{builtin_spec, recursify};
use arrwwid_core::sim::{random_queries, simulate, uniform_points, CostModel, Layout};
use arrwwid_core::tiling::DEFAULT_TILE_BUDGET;
use arrwwid_core::{expand, vertex_degrees, Coord, Point};
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn expansion(c: &mut Criterion) {
    let daun = builtin("daun").unwrap();
    c.bench_function("expand daun depth 3", |b| b.iter(|| expand(&daun.rules, 3, DEFAULT_TILE_BUDGET).unwrap()));
    let ts = expand(&daun.rules, 3, DEFAULT_TILE_BUDGET).unwrap();
    c.bench_function("vertex_degrees daun depth 3", |b| b.iter(|| vertex_degrees(black_box(&ts))));
}

fn covers(c: &mut Criterion) {
    let dekking = builtin("dekking").unwrap();
    let q = QueryRange::ball(Point::xy(Coord::ratio(2, 5), Coord::ratio(3, 7)), Coord::ratio(1, 50));
    c.bench_function("cover_fragments dekking", |b| {
        b.iter(|| cover_fragments(&dekking.rules, &dekking.window, black_box(&q), &MergeBudget::Off).unwrap())
    });
    let queries = random_queries(&dekking.rules, 200, 0.01, 0.1, 7);
    c.bench_function("cover_batch dekking 200", |b| {
        b.iter(|| cover_batch(&dekking.rules, &dekking.window, black_box(&queries), &MergeBudget::Off).unwrap())
    });
}

fn lattices(c: &mut Criterion) {
    let spec = builtin_spec("gosper7").unwrap();
    c.bench_function("recursify gosper7 level 3", |b| b.iter(|| recursify(&spec, 3).unwrap()));
}

fn simulation(c: &mut Criterion) {
    let h = builtin("hilbert").unwrap();
    let points = uniform_points(&h.rules, 20_000, 1);
    let layout = Layout::build(&h.rules, 6, DEFAULT_TILE_BUDGET, &points).unwrap();
    let queries = random_queries(&h.rules, 100, 0.01, 0.1, 2);
    let model = CostModel::new(100.0, 1.0).unwrap();
    c.bench_function("simulate hilbert 100 queries", |b| {
        b.iter(|| simulate(&h.rules, &h.window, &layout, black_box(&queries), model).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = expansion, covers, lattices, simulation
}
criterion_main!(benches);
