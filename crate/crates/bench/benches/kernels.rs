//! Microbenchmarks for the kernels that dominate grid evaluation. Run with
//! `cargo bench -p rzspec-bench`.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use rzspec_core::{
    bessel_k, gamma_complex, hyp2f1_16_56_1, potential_v, tau_of_z, zeta, BesselOrder,
    PhiEvaluator, PsiEvaluator, UpperHalfPoint, ZetaZero,
};

const GAMMA_1: f64 = 14.134725141734694;

fn bench_kernels(c: &mut Criterion) {
    let s = Complex64::new(0.5, GAMMA_1);

    c.bench_function("gamma_complex_critical_line", |b| {
        b.iter(|| gamma_complex(black_box(s)).unwrap())
    });

    c.bench_function("zeta_critical_line", |b| {
        b.iter(|| zeta(black_box(2.0 * s)).unwrap())
    });

    let order = BesselOrder::new(s - 0.5).unwrap();
    c.bench_function("bessel_k_imaginary_order", |b| {
        b.iter(|| bessel_k(black_box(order), black_box(9.4)).unwrap())
    });

    let w = Complex64::new(0.37, 0.21);
    c.bench_function("hyp2f1_16_56_1", |b| {
        b.iter(|| hyp2f1_16_56_1(black_box(w)).unwrap())
    });

    c.bench_function("tau_of_z", |b| {
        b.iter(|| tau_of_z(black_box(Complex64::new(0.4, 0.7))).unwrap())
    });

    c.bench_function("potential_v", |b| {
        b.iter(|| potential_v(black_box(Complex64::new(0.4, 0.7))).unwrap())
    });

    let phi = PhiEvaluator::new(s).unwrap();
    let tau = UpperHalfPoint::new(Complex64::new(0.21, 1.37)).unwrap();
    c.bench_function("phi_reduced_point", |b| b.iter(|| phi.phi(black_box(&tau)).unwrap()));

    let zero = ZetaZero::from_gamma(1, GAMMA_1);
    let psi = PsiEvaluator::new(&zero).unwrap();
    c.bench_function("psi_grid_point", |b| {
        b.iter(|| psi.psi(black_box(Complex64::new(0.4, 0.7))).unwrap())
    });
}

criterion_group!(kernels, bench_kernels);
criterion_main!(kernels);
