//! Kernel benchmarks: transform round trip, mollification, commutator
//! assembly and a full solver right-hand side at production resolution.

use acns_core::initial::InitialData;
use acns_core::solver::{self, FluidState, SolverConfig};
use acns_core::spectral::{self, ScalarField};
use acns_core::{PressureLaw, SpectralGrid, ViscosityTensor};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("transform_round_trip");
    for n in [32usize, 64, 128] {
        let grid = SpectralGrid::new(2, n).unwrap();
        let field = ScalarField::from_fn(&grid, |x| (x[0].sin() * (2.0 * x[1]).cos()).exp());
        group.bench_with_input(BenchmarkId::from_parameter(n), &field, |b, field| {
            b.iter(|| ScalarField::from_spectrum(field.grid(), &field.to_spectrum()))
        });
    }
    group.finish();
}

fn bench_mollify_and_commutator(c: &mut Criterion) {
    let grid = SpectralGrid::new(2, 64).unwrap();
    let a = ScalarField::from_fn(&grid, |x| (2.0 * x[1]).cos() + 0.3 * x[0].sin());
    let b = ScalarField::from_fn(&grid, |x| x[0].sin());
    c.bench_function("mollify_n64", |bench| bench.iter(|| a.mollify(0.1).unwrap()));
    c.bench_function("commutator_r1_n64", |bench| {
        bench.iter(|| spectral::commutator_r1(&a, &b, 0.1).unwrap())
    });
}

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble_rhs");
    group.sample_size(20);
    for n in [32usize, 64] {
        let grid = SpectralGrid::new(2, n).unwrap();
        let law = PressureLaw::new(1.0, 2.0, 1.0).unwrap();
        let tensor = ViscosityTensor::random_symmetric(2, 1.0, 0.0, 42, 0.05).unwrap();
        let config = SolverConfig {
            d: 2,
            n,
            delta: 0.1,
            cfl: 0.4,
            t_end: 1.0,
            rho_floor: 1e-6,
            dealias: true,
            cadence_dt: 0.0125,
            store_velocity: false,
        };
        let (rho, u) = InitialData::Acoustic { k: 1, eps: 0.01 }.build(&grid, 1.0).unwrap();
        let state = FluidState::from_primitive(rho, &u, 0.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, state| {
            b.iter(|| solver::assemble_rhs(state, &tensor, &law, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_transforms, bench_mollify_and_commutator, bench_rhs);
criterion_main!(benches);
