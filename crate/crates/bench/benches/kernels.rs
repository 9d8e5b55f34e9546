use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use metastable::operator::{build_witten_matrix, smallest_eigenvalues};
use metastable::potential::find_critical_points;
use metastable::spectral::predict_spectrum;
use metastable::topology::{build_landscape, Filtration, TopologyParams};
use metastable_bench::{cross_potential, double_well};

fn bench_filtration(c: &mut Criterion) {
    let p = cross_potential();
    c.bench_function("filtration_build_257x257", |b| {
        b.iter(|| Filtration::build(black_box(&p), 257, None).unwrap())
    });
}

fn bench_landscape(c: &mut Criterion) {
    let p = double_well();
    let (points, _) = find_critical_points(&p, 48, 1e-10).unwrap();
    let filt = Filtration::build(&p, 4097, None).unwrap();
    c.bench_function("landscape_sweep_4097", |b| {
        b.iter(|| build_landscape(&p, &filt, &points, &TopologyParams::default()).unwrap())
    });
}

fn bench_assembly_and_eigen(c: &mut Criterion) {
    let p = double_well();
    c.bench_function("witten_assemble_4001", |b| {
        b.iter(|| build_witten_matrix(black_box(&p), 4001, 0.03).unwrap())
    });
    let op = build_witten_matrix(&p, 4001, 0.03).unwrap();
    c.bench_function("witten_eigen_3_of_4001", |b| {
        b.iter(|| smallest_eigenvalues(black_box(&op), 3, 1e-8).unwrap())
    });
}

fn bench_predict(c: &mut Criterion) {
    let p = double_well();
    let (points, _) = find_critical_points(&p, 48, 1e-10).unwrap();
    let filt = Filtration::build(&p, 1025, None).unwrap();
    let land = build_landscape(&p, &filt, &points, &TopologyParams::default()).unwrap();
    c.bench_function("predict_spectrum", |b| {
        b.iter(|| predict_spectrum(black_box(&land), 1.0, 0.03).unwrap())
    });
}

criterion_group!(
    benches,
    bench_filtration,
    bench_landscape,
    bench_assembly_and_eigen,
    bench_predict
);
criterion_main!(benches);
