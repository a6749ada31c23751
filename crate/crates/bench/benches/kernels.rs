use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lrcone_core::bounds::{choose_l, fixpoint_gamma, run_recursion, xi_constant, RecursionInputs};
use lrcone_core::dynamics::leakage_profile;
use lrcone_core::linalg::embed_one_site;
use lrcone_core::pauli::PauliCoefficients;
use lrcone_core::{Ensemble, EvolutionContext, Lattice, NormKind, Pauli, PowerLawHamiltonian};

fn setup(n: usize) -> (Lattice, PowerLawHamiltonian) {
    let lattice = Lattice::chain(n).unwrap();
    let h = PowerLawHamiltonian::sample(&lattice, 2.5, Ensemble::RandomTwoBody, 11).unwrap();
    (lattice, h)
}

fn pauli_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("pauli_transform");
    for n in [4, 6, 8] {
        let (_, h) = setup(n);
        let m = h.dense();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| PauliCoefficients::from_matrix(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn evolution(c: &mut Criterion) {
    let mut group = c.benchmark_group("evolution");
    group.sample_size(10);
    for n in [4, 6, 8] {
        let (lattice, h) = setup(n);
        group.bench_with_input(BenchmarkId::new("eigh", n), &h, |b, h| {
            b.iter(|| EvolutionContext::new(black_box(h)).unwrap())
        });
        let ctx = EvolutionContext::new(&h).unwrap();
        let op = embed_one_site(&Pauli::X.matrix(), 0, n);
        let heis = ctx.heisenberg(&op).unwrap();
        group.bench_with_input(BenchmarkId::new("heisenberg_at", n), &heis, |b, heis| {
            b.iter(|| heis.at(black_box(1.3)))
        });
        let evolved = heis.at(1.3);
        let radii: Vec<f64> = (1..n).map(|r| r as f64).collect();
        group.bench_with_input(BenchmarkId::new("leakage_profile", n), &evolved, |b, o| {
            b.iter(|| leakage_profile(black_box(o), &lattice, 0, &radii, NormKind::Operator).unwrap())
        });
    }
    group.finish();
}

fn bounds(c: &mut Criterion) {
    c.bench_function("fixpoint_gamma", |b| {
        b.iter(|| fixpoint_gamma(black_box(2.5), 1, 0.0, 1e-12, 10_000).unwrap())
    });
    let xi = xi_constant(1).unwrap();
    let r_star = 1e8;
    let l = choose_l(r_star, xi, 2.5, 1).unwrap();
    let inputs = RecursionInputs {
        tau: 0.1,
        base: l.value,
        n: 6,
        xi,
        nu: 1.0,
        lambda: 1.0,
        alpha: 2.5,
        d: 1,
        r_star,
    };
    c.bench_function("run_recursion", |b| b.iter(|| run_recursion(black_box(inputs)).unwrap()));
}

criterion_group!(benches, pauli_transform, evolution, bounds);
criterion_main!(benches);
