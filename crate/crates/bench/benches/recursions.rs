//! Closed-form side: coefficient recursions, the distribution iteration,
//! and the dense eigensolver behind the matrix ensembles.

use combscope_core::{
    hermitian_eigenvalues, renewal_measure, tm_distribution, volterra_step, Complex64,
    TmAutocorrelation, WaitingTime,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eta_recursion(c: &mut Criterion) {
    c.bench_function("tm_eta_4096", |b| {
        b.iter(|| {
            let mut table = TmAutocorrelation::new();
            let mut acc = 0.0;
            for m in 0..4096i64 {
                acc += table.eta_f64(black_box(m));
            }
            acc
        })
    });
}

fn distribution_iteration(c: &mut Criterion) {
    let (f, _) = tm_distribution(6, 1 << 12).unwrap();
    c.bench_function("volterra_step_4096", |b| {
        b.iter(|| volterra_step(black_box(&f)).unwrap())
    });
    c.bench_function("tm_distribution_10x4096", |b| {
        b.iter(|| tm_distribution(black_box(10), 1 << 12).unwrap())
    });
}

fn eigensolver(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eigenvalues");
    for n in [50usize, 100] {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                data[i * n + j] = z;
                data[j * n + i] = z.conj();
            }
            data[i * n + i] = Complex64::new(rng.gen::<f64>(), 0.0);
        }
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| hermitian_eigenvalues(n, black_box(&data)).unwrap())
        });
    }
    group.finish();
}

fn renewal_series(c: &mut Criterion) {
    let law = WaitingTime::gamma(2.0).unwrap();
    c.bench_function("renewal_measure_gamma", |b| {
        b.iter(|| renewal_measure(black_box(&law), 12.0, 2400).unwrap())
    });
}

criterion_group!(benches, eta_recursion, distribution_iteration, eigensolver, renewal_series);
criterion_main!(benches);
