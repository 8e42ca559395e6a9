use std::f64::consts::PI;

use modtau::charvar::*;
use modtau::{Complex64 as C64, Error, PrecisionContext};
use proptest::prelude::*;

const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pt() -> MonodromyPoint {
    MonodromyPoint::real(0.23, 1.1, 0.17)
}

/// Distance of x to the lattice ½ℤ, used for "modulo shifts" comparisons of a.
fn half_lattice(x: C64) -> f64 {
    let y = 2.0 * x;
    (y - y.re.round()).norm() / 2.0
}

/// Distance of x to 4πℤ.
fn nu_lattice(x: C64) -> f64 {
    let y = x / (4.0 * PI);
    (y - y.re.round()).norm() * 4.0 * PI
}

#[test]
fn quarter_point_without_mass() {
    let r = build_monodromy(&MonodromyPoint::real(0.25, 0.0, 0.0)).unwrap();
    assert!((r.mb.trace() - 2.0).norm() < 1e-14);
    assert!(r.constraint_residual() < 1e-14);
    assert!(trace_coords(&MonodromyPoint::real(0.25, 0.7, 0.1)).unwrap().a.norm() < 1e-15);
}

#[test]
fn puncture_monodromy_trace() {
    let r = build_monodromy(&MonodromyPoint::real(0.21, 1.3, 0.17)).unwrap();
    assert!((r.m0.trace() - 2.0 * (2.0 * PI * 0.17).cos()).norm() < 1e-10);
    for m in [r.ma, r.mb, r.m0] {
        assert!((m.det() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn degenerate_a_is_rejected() {
    assert!(matches!(build_monodromy(&MonodromyPoint::real(0.5, 1.0, 0.1)), Err(Error::Degenerate { .. })));
}

#[test]
fn massless_traces() {
    let (a, nu) = (0.2, 1.1);
    let t = trace_coords(&MonodromyPoint::real(a, nu, 0.0)).unwrap();
    assert!((t.b - 2.0 * (nu / 2.0).cos()).norm() < 1e-14);
    assert!((t.c - 2.0 * (2.0 * PI * a - nu / 2.0).cos()).norm() < 1e-14);
}

#[test]
fn traces_match_oracle_and_matrices() {
    // mpmath, 30 digits
    let t = trace_coords(&pt()).unwrap();
    assert!((t.a - 0.250_666_467_128_608_5).norm() < 1e-14);
    assert!((t.b - c(1.467_607_370_376_134_5, 0.067_224_775_728_42)).norm() < 1e-14);
    assert!((t.c - c(1.076_642_533_313_421_2, -0.100_356_300_832_950_3)).norm() < 1e-14);
    let p = MonodromyPoint::real(0.23, 0.9, 0.11);
    let m = build_monodromy(&p).unwrap().traces();
    assert!(m.distance(&trace_coords(&p).unwrap()) < 1e-12);
}

#[test]
fn fricke_identity_and_linearisation() {
    let id = TraceCoords { a: c(2.0, 0.0), b: c(2.0, 0.0), c: c(2.0, 0.0) };
    assert_eq!(fricke_residual(&id, c(0.0, 0.0)), c(0.0, 0.0));
    let t = trace_coords(&pt()).unwrap();
    assert!(fricke_residual(&t, pt().m).norm() < 1e-12);
    let h = 1e-3;
    let moved = TraceCoords { c: t.c + h, ..t };
    let r = fricke_residual(&moved, pt().m);
    assert!((r - (2.0 * t.c - t.a * t.b) * h).norm() < 2e-6);
}

#[test]
fn a_from_dual_cases() {
    let d = DualMonodromyPoint::new(c(0.1, 0.0), c(0.4, 0.0), c(0.0, 0.0));
    assert!(a_from_dual(&d, c(1.1, 0.0)).unwrap().norm() < 1e-15);
    let (d, _) = dual_from_primal(&pt()).unwrap();
    let a = a_from_dual(&d, pt().nu).unwrap();
    assert!(half_lattice(a - pt().a) < 1e-10);
    let ta = 2.0 * (2.0 * PI * a).cos();
    let shifted = (2.0 * PI * I * a).exp() + (-2.0 * PI * I * a).exp();
    assert!((ta - shifted).norm() < 1e-10);
}

#[test]
fn dual_map_at_reference_point() {
    let (d, _) = dual_from_primal(&pt()).unwrap();
    let t = trace_coords(&pt()).unwrap();
    let dt = dual_trace_coords(&d).unwrap();
    assert!(t.distance(&dt) < 1e-10);
    // mpmath oracle (same representative up to ã ↦ −ã, ν̃ ↦ −ν̃ and 4πℤ)
    let (at, nut) = (c(-0.119_080_877_593_073_82, 0.007_860_061_813_130_722), c(2.975_098_885_093_615_8, -1.506_583_860_602_922_7));
    let direct = (d.at - at).norm().max(nu_lattice(d.nut - nut));
    let flipped = (d.at + at).norm().max(nu_lattice(d.nut + nut));
    assert!(direct.min(flipped) < 1e-10, "{d:?}");
}

#[test]
fn massless_dual_map() {
    let (a, nu) = (0.2, 1.1);
    let (d, _) = dual_from_primal(&MonodromyPoint::real(a, nu, 0.0)).unwrap();
    assert!((d.at - nu / (4.0 * PI)).norm() < 1e-12);
    assert!(nu_lattice(d.nut + 4.0 * PI * a) < 1e-10);
    let (a2, nu2) = nu_from_dual(&d).unwrap();
    assert!(half_lattice(a2 - a) < 1e-10);
    assert!((nu2 - 4.0 * PI * d.at).norm() < 1e-10 || nu_lattice(nu2 - nu) < 1e-10);
}

#[test]
fn double_s_exchanges_roots() {
    let t = trace_coords(&pt()).unwrap();
    let (d, _) = dual_from_primal(&pt()).unwrap();
    let once = dual_trace_coords(&d).unwrap();
    // re-read the dual representation as a primal one and dualise again
    let p2 = MonodromyPoint::new(d.at, d.nut, d.m);
    let (d2, _) = dual_from_primal(&p2).unwrap();
    let twice = dual_trace_coords(&d2).unwrap();
    assert!((once.b - t.b).norm() < 1e-10);
    let t2 = trace_coords(&p2).unwrap();
    assert!((twice.c - t2.c).norm() < 1e-9);
    assert!((t.s_transform().s_transform().c - t.c).norm() < 1e-12);
    assert!((t.s_transform().c - (t.a * t.b - t.c)).norm() < 1e-15);
}

#[test]
fn inverse_map_round_trip() {
    let (d, _) = dual_from_primal(&pt()).unwrap();
    let (a, nu) = nu_from_dual(&d).unwrap();
    assert!(half_lattice(a - pt().a) < 1e-9 || half_lattice(a + pt().a) < 1e-9);
    let back = trace_coords(&MonodromyPoint::new(a, nu, pt().m)).unwrap();
    assert!(back.distance(&trace_coords(&pt()).unwrap()) < 1e-9);
    let (r1, r2) = nueqamnut_residuals(pt().a, pt().nu, d.at, d.nut, pt().m);
    assert!(r1.norm() < 1e-10 && r2.norm() < 1e-10, "{r1} {r2}");
}

#[test]
fn eta_exponential_form() {
    // mpmath gamma, 30 digits
    let e = eta_of_nu(&pt()).unwrap();
    let lhs = (2.0 * PI * I * e).exp();
    assert!((lhs - c(0.939_419_737_250_620_5, 0.575_963_138_374_126)).norm() < 1e-12);
    let d = DualMonodromyPoint::new(c(0.31, 0.0), c(0.7, 0.0), c(0.17, 0.0));
    let lhs = (2.0 * PI * I * eta_tilde(&d).unwrap()).exp();
    assert!((lhs - c(0.686_168_012_241_749_1, 0.250_470_876_709_390_03)).norm() < 1e-12);
}

#[test]
fn delta_nu_properties() {
    let (a, m) = (c(0.23, 0.0), c(0.17, 0.0));
    assert!(delta_nu(a, c(0.0, 0.0)).unwrap().norm() < 1e-15);
    let e0 = eta_of_nu(&MonodromyPoint::real(0.23, 1.1, 0.0)).unwrap();
    assert!((e0 - 1.1 / (4.0 * PI)).norm() < 1e-15);
    let dn = delta_nu(a, m).unwrap();
    for nu in [0.5, 1.5, 3.0] {
        let p = MonodromyPoint::new(a, c(nu, 0.0), m);
        assert!((4.0 * PI * eta_of_nu(&p).unwrap() - nu - dn).norm() < 1e-13);
    }
}

#[test]
fn goldman_bracket() {
    let ctx = PrecisionContext { fd_step: 1e-5, ..PrecisionContext::default() };
    let p0 = MonodromyPoint::real(0.23, 1.1, 0.0);
    assert!(goldman_residual(&p0, &ctx).unwrap().norm() < 1e-7);
    let r = goldman_residual(&pt(), &ctx).unwrap();
    assert!(r.norm() < 1e-6);
    let shifted = goldman_residual(&MonodromyPoint::real(0.23, 1.1, 0.17 + 1e-6), &ctx).unwrap();
    assert!((shifted - r).norm() < 1e-6);
}

#[test]
fn symmetries_fix_traces() {
    let p = pt();
    let t = trace_coords(&p).unwrap();
    let s = trace_coords(&apply_symmetry(&p, Symmetry::SignFlip).unwrap()).unwrap();
    assert!((s.a - t.a).norm() < 1e-12 && (s.b - t.b).norm() < 1e-12);
    let sh = trace_coords(&apply_symmetry(&p, Symmetry::Shift { k_a: 1, k_nu: 0, k_m: 0 }).unwrap()).unwrap();
    assert!(sh.distance(&t) < 1e-13);
    let mf = trace_coords(&apply_symmetry(&p, Symmetry::MFlip).unwrap()).unwrap();
    assert!((mf.b - t.b).norm() < 1e-10);
}

fn point() -> impl Strategy<Value = MonodromyPoint> {
    (0.05f64..0.45, 0.2f64..(4.0 * PI - 0.2), 0.02f64..0.45)
        .prop_filter("non-resonant", |(a, _, m)| {
            let d = |x: f64| (x - x.round()).abs();
            d(2.0 * a) > 0.05 && d(2.0 * a - m) > 0.05 && d(2.0 * a + m) > 0.05
        })
        .prop_map(|(a, nu, m)| MonodromyPoint::real(a, nu, m))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn constraint_and_fricke(p in point()) {
        let r = build_monodromy(&p).unwrap();
        prop_assert!(r.constraint_residual() < 1e-10);
        let t = trace_coords(&p).unwrap();
        prop_assert!(fricke_residual(&t, p.m).norm() < 1e-10);
        prop_assert!(r.traces().distance(&t) < 1e-12);
    }

    #[test]
    fn dual_round_trip(p in point()) {
        let t = trace_coords(&p).unwrap();
        let (d, _) = dual_from_primal(&p).unwrap();
        prop_assert!(dual_trace_coords(&d).unwrap().distance(&t) < 1e-10);
        let (a, nu) = nu_from_dual(&d).unwrap();
        let back = trace_coords(&MonodromyPoint::new(a, nu, p.m)).unwrap();
        prop_assert!(back.distance(&t) < 1e-9);
    }

    #[test]
    fn goldman_random(p in point()) {
        let ctx = PrecisionContext { fd_step: 1e-5, ..PrecisionContext::default() };
        let t = trace_coords(&p).unwrap();
        let r = goldman_residual(&p, &ctx).unwrap();
        prop_assert!(r.norm() < 1e-6 * (1.0 + t.c.norm()));
    }
}
