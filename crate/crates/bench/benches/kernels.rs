use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use modtau::charvar::MonodromyPoint;
use modtau::flow::{connection_ratio, FlowConfig};
use modtau::modular::{c1_kernel, upsilon_full, KernelPoint};
use modtau::specfun::theta1;
use modtau::{Complex64 as C64, HalfPlanePoint, PrecisionContext};

fn specfun(c: &mut Criterion) {
    let ctx = PrecisionContext::default();
    let tau = HalfPlanePoint::new(C64::new(0.1, 1.2)).unwrap();
    let z = C64::new(0.3, 0.2);
    c.bench_function("theta1", |b| b.iter(|| theta1(black_box(z), tau, 0, &ctx).unwrap()));
    c.bench_function("theta1_third_derivative", |b| b.iter(|| theta1(black_box(z), tau, 3, &ctx).unwrap()));
}

fn modular(c: &mut Criterion) {
    let ctx = PrecisionContext::default();
    let p = MonodromyPoint::real(0.23, 1.1, 0.17);
    c.bench_function("upsilon_full", |b| b.iter(|| upsilon_full(black_box(&p), &ctx).unwrap()));
    let k = KernelPoint::new(C64::new(0.23, 0.0), C64::new(0.31, 0.0), C64::new(0.17, 0.0));
    c.bench_function("c1_kernel", |b| b.iter(|| c1_kernel(black_box(&k), &ctx).unwrap()));
}

fn flow(c: &mut Criterion) {
    let ctx = PrecisionContext::default();
    let p = MonodromyPoint::real(0.15, 0.8, 0.1);
    let cfg = FlowConfig::default();
    let mut g = c.benchmark_group("flow");
    g.sample_size(10);
    g.bench_function("connection_ratio", |b| b.iter(|| connection_ratio(black_box(&p), &cfg, &ctx).unwrap()));
    g.finish();
}

criterion_group!(benches, specfun, modular, flow);
criterion_main!(benches);
