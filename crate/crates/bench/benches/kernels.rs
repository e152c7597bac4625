use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use equidist_core::dioph::{kernel_project, ExactMatrix};
use equidist_core::heights::{shortest_vector, LatticeFrame};
use equidist_core::lattice_count::count_sl2z;
use equidist_core::lie::builtin;
use equidist_core::linnik::{enumerate_levelset, sweep_levels, RegionBox, RegionGrid, DEFAULT_CANDIDATE_CAP};
use equidist_core::subalgebra::{iterated_brackets, perturbed_block_sl2, prop_e, NearestOptions, DEFAULT_CLOSURE_CAP};

fn subalgebra(c: &mut Criterion) {
    let sl3 = builtin("sl3").unwrap();
    let t = perturbed_block_sl2(&sl3, 1e-7).unwrap();
    c.bench_function("iterated_brackets sl3 depth 3", |b| {
        b.iter(|| iterated_brackets(&sl3, black_box(&t), 3, DEFAULT_CLOSURE_CAP).unwrap())
    });
    c.bench_function("prop_e sl3 δ=1e-2", |b| {
        b.iter(|| prop_e(&sl3, black_box(&t), 1e-2, None, DEFAULT_CLOSURE_CAP, NearestOptions::default()).unwrap())
    });
}

fn lattices(c: &mut Criterion) {
    let basis = vec![
        vec![1.0, 0.0, 0.0, 0.0, 31.0],
        vec![0.0, 1.0, 0.0, 0.0, 17.0],
        vec![0.0, 0.0, 1.0, 0.0, -23.0],
        vec![0.0, 0.0, 0.0, 1.0, 11.0],
        vec![0.0, 0.0, 0.0, 0.0, 97.0],
    ];
    let l = LatticeFrame::new(basis).unwrap();
    c.bench_function("lll 5d", |b| b.iter(|| black_box(&l).lll_reduced(0.99)));
    c.bench_function("shortest_vector 5d", |b| b.iter(|| shortest_vector(black_box(&l)).unwrap()));
    let a = ExactMatrix::from_i64(&[vec![1, 2, -1, 4], vec![3, 6, -3, 12], vec![0, 1, 1, -2]]).unwrap();
    let v = [1.0, -0.5, 0.5, 0.0];
    c.bench_function("kernel_project 3x4", |b| b.iter(|| kernel_project(&a, black_box(&v), 1e-3).unwrap()));
    c.bench_function("count_sl2z T=200", |b| b.iter(|| count_sl2z(black_box(200)).unwrap()));
}

fn levelsets(c: &mut Criterion) {
    let region = RegionBox::case_a();
    let grid = RegionGrid::new(region.clone(), 2).unwrap();
    c.bench_function("enumerate_levelset d=2001", |b| {
        b.iter(|| enumerate_levelset(black_box(2001), &region, DEFAULT_CANDIDATE_CAP).unwrap())
    });
    let levels: Vec<i64> = (1..=2000).collect();
    c.bench_function("sweep_levels d ≤ 2000", |b| b.iter(|| sweep_levels(black_box(&levels), &grid, DEFAULT_CANDIDATE_CAP).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = subalgebra, lattices, levelsets
}
criterion_main!(benches);
