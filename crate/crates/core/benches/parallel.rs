//! Sequential versus rayon execution of the data-parallel kernels.
//!
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use raman_cavity::beamsplitter::{BeamSplitter, Tuning};
use raman_cavity::discrimination::{build_povm, run_qubit_experiment, Priors};
use raman_cavity::fock::{mixture_state_with, CoherentMixture, FockCutoff};
use raman_cavity::linalg::{outer, CVector};
use raman_cavity::{Complex64, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn ring(points: usize) -> CoherentMixture {
    CoherentMixture::phase_ring(1.5, points, 0.1).unwrap()
}

fn beam_splitter(c: &mut Criterion) {
    let mut group = c.benchmark_group("beam_splitter_apply");
    group.sample_size(10);
    let tuning = Tuning::from_kappa(Complex64::new(-1.0, 0.3)).unwrap();
    for n_max in [20, 40] {
        let cutoff = FockCutoff::new(n_max);
        let bs = BeamSplitter::from_tuning(&tuning, n_max).unwrap();
        let rho = mixture_state_with(&ring(4), cutoff, 1e-6, Exec::Parallel).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n_max), &rho, |b, rho| {
                b.iter(|| black_box(bs.apply_with(rho, exec).unwrap()))
            });
        }
    }
    group.finish();
}

fn splitter_construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("beam_splitter_build");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 60), |b| {
            b.iter(|| black_box(BeamSplitter::from_lambda_with(Complex64::new(0.4, -0.6), 60, exec)))
        });
    }
    group.finish();
}

fn mixture(c: &mut Criterion) {
    let mut group = c.benchmark_group("mixture_state");
    group.sample_size(10);
    let cutoff = FockCutoff::new(30);
    let mix = ring(32);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 32), |b| {
            b.iter(|| black_box(mixture_state_with(&mix, cutoff, 1e-6, exec).unwrap()))
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrimination_monte_carlo");
    group.sample_size(10);
    let a = 0.1;
    let phi = |z: Complex64| {
        let v = CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(a, 0.0) / z.conj()]);
        v.unscale(v.norm())
    };
    let (r, s) = (phi(Complex64::new(1.0, 0.0)), phi(Complex64::new(0.0, 1.0)));
    let povm = build_povm(&r, &s, Priors::EQUAL).unwrap();
    let states = [outer(&r), outer(&s)];
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 1_000_000), |b| {
            b.iter(|| black_box(run_qubit_experiment([&states[0], &states[1]], &povm, 1_000_000, 42, exec)))
        });
    }
    group.finish();
}

criterion_group!(benches, beam_splitter, splitter_construction, mixture, monte_carlo);
criterion_main!(benches);
