//! Benchmarks for the hot paths: closed-form kernel evaluation, trace-route
//! kernels, symbol sampling and operator reconstruction.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use phasemap_core::{
    make_state, moyal_kernel, s_kernel, sordered_pair, star_kernel, symbol_field, weyl_pair,
    FockSpace, LabelGrid, PhasePoint, SOrder, StateKind,
};

fn bench_closed_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("closed-kernels");
    let (x, y, z) = (
        PhasePoint::new(0.3, -0.2),
        PhasePoint::new(-0.1, 0.4),
        PhasePoint::new(0.2, 0.1),
    );
    g.bench_function("moyal", |b| {
        b.iter(|| std::hint::black_box(moyal_kernel(x, y, z)))
    });
    let order = SOrder::new(0.4).unwrap();
    for n in [3usize, 4, 6] {
        let alphas: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new(0.1 * k as f64, -0.05 * k as f64))
            .collect();
        g.bench_with_input(BenchmarkId::new("s-ordered", n), &alphas, |b, a| {
            b.iter(|| std::hint::black_box(s_kernel(order, a).unwrap()))
        });
    }
    g.finish();
}

fn bench_trace_kernel(c: &mut Criterion) {
    let mut g = c.benchmark_group("trace-kernel");
    g.sample_size(20);
    let (y, z, x) = ([0.3, -0.2], [-0.1, 0.4], [0.2, 0.1]);
    for dim in [16usize, 32, 48] {
        let space = FockSpace::new(dim).unwrap();
        let pair = weyl_pair(space).unwrap();
        g.bench_with_input(BenchmarkId::new("weyl", dim), &pair, |b, p| {
            b.iter(|| std::hint::black_box(star_kernel(p, &[&y, &z], &x).unwrap()))
        });
    }
    g.finish();
}

fn bench_symbol_field(c: &mut Criterion) {
    let mut g = c.benchmark_group("symbol-field");
    g.sample_size(10);
    let grid = LabelGrid::square(6.0, 32).unwrap();
    for dim in [16usize, 24] {
        let space = FockSpace::new(dim).unwrap();
        let pair = weyl_pair(space).unwrap();
        let rho = make_state(space, StateKind::Coherent(Complex64::new(0.5, 0.0))).unwrap();
        g.bench_with_input(BenchmarkId::new("weyl-32x32", dim), &(), |b, _| {
            b.iter(|| std::hint::black_box(symbol_field(&rho, &pair, &grid).unwrap()))
        });
    }
    g.finish();
}

fn bench_quantizer_build(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantizer-build");
    let order = SOrder::new(-0.4).unwrap();
    for dim in [32usize, 64] {
        let space = FockSpace::new(dim).unwrap();
        let pair = sordered_pair(space, order).unwrap();
        g.bench_with_input(BenchmarkId::new("sordered(-0.4)", dim), &pair, |b, p| {
            b.iter(|| std::hint::black_box(p.u_at(&[0.3, -0.2])))
        });
    }
    g.finish();
}

criterion_group!(
    benches,
    bench_closed_kernels,
    bench_trace_kernel,
    bench_symbol_field,
    bench_quantizer_build
);
criterion_main!(benches);
