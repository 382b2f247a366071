use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fockbound_core::rng::{complex_gaussian, rng_from_seed};
use fockbound_core::verifier::run_full_suite;
use fockbound_core::{
    apply_annihilate, apply_create, apply_partial, assemble_sector_matrix, build_basis, permanent,
    FockVector, OneParticleOperator, OneParticleVector, OrthonormalSystem, QuadraticKind,
    QuadraticOperatorSpec, ToleranceConfig,
};
use nalgebra::DMatrix;

fn bench_permanent(c: &mut Criterion) {
    let mut group = c.benchmark_group("permanent");
    let mut rng = rng_from_seed(1);
    for n in [4usize, 8, 12] {
        let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| permanent(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn bench_ladder(c: &mut Criterion) {
    let mut group = c.benchmark_group("ladder");
    let mut rng = rng_from_seed(2);
    for (d, n_max) in [(6usize, 4usize), (12, 4)] {
        let basis = build_basis(d, n_max).unwrap();
        let f = OneParticleVector::random(d, &mut rng);
        let sectors: Vec<usize> = (0..n_max).collect();
        let phi = FockVector::random(&basis, &sectors, &mut rng).unwrap();
        let label = format!("d{d}_n{n_max}");
        group.bench_function(BenchmarkId::new("create", &label), |b| {
            b.iter(|| apply_create(black_box(&f), black_box(&phi)).unwrap())
        });
        group.bench_function(BenchmarkId::new("annihilate", &label), |b| {
            b.iter(|| apply_annihilate(black_box(&f), black_box(&phi)).unwrap())
        });
    }
    group.finish();
}

fn bench_partial(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_partial");
    let d = 8;
    let basis = build_basis(d, 4).unwrap();
    let mut rng = rng_from_seed(3);
    let coeff = OneParticleOperator::random(d, &mut rng);
    let ons = OrthonormalSystem::random(d, d, 3).unwrap();
    let phi = FockVector::random(&basis, &[0, 1, 2], &mut rng).unwrap();
    for kind in QuadraticKind::ALL {
        let spec = match kind {
            QuadraticKind::Number => QuadraticOperatorSpec::number(ons.clone(), d).unwrap(),
            _ => QuadraticOperatorSpec::full(kind, coeff.clone(), ons.clone()).unwrap(),
        };
        group.bench_function(kind.name(), |b| {
            b.iter(|| apply_partial(black_box(&spec), black_box(&phi)).unwrap())
        });
    }
    group.finish();
}

fn bench_sector_matrix(c: &mut Criterion) {
    let d = 6;
    let basis = build_basis(d, 4).unwrap();
    let mut rng = rng_from_seed(4);
    let spec = QuadraticOperatorSpec::full(
        QuadraticKind::DGamma,
        OneParticleOperator::random(d, &mut rng),
        OrthonormalSystem::canonical(d),
    )
    .unwrap();
    c.bench_function("sector_matrix/dgamma_d6_n3", |b| {
        b.iter(|| assemble_sector_matrix(black_box(&spec), &basis, 3).unwrap())
    });
}

fn bench_suite(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    group.bench_function("d3_n2", |b| {
        b.iter(|| run_full_suite(3, 2, black_box(1), &tol).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_permanent,
    bench_ladder,
    bench_partial,
    bench_sector_matrix,
    bench_suite
);
criterion_main!(benches);
