use std::f64::consts::PI;

use modtau::charvar::{a_from_dual, dual_from_primal, DualMonodromyPoint, MonodromyPoint};
use modtau::flow::{connection_ratio, FlowConfig};
use modtau::modular::*;
use modtau::numerics::quad::QuadConfig;
use modtau::specfun::{dedekind_eta, theta1};
use modtau::{Complex64 as C64, HalfPlanePoint, PrecisionContext};
use proptest::prelude::*;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn pt() -> MonodromyPoint {
    MonodromyPoint::real(0.23, 1.1, 0.17)
}

fn rel(x: C64, y: C64) -> f64 {
    (x - y).norm() / y.norm().max(1e-300)
}

fn d5<F: Fn(f64) -> C64>(f: F, h: f64) -> C64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// Distance of (x − 2πi)/4πi to ℤ, scaled back.
fn log_lattice(x: C64) -> f64 {
    let k = x / (4.0 * PI * I) - 0.5;
    (k - k.re.round()).norm() * 4.0 * PI
}

#[test]
fn block_providers() {
    let (a, m) = (c(0.23, 0.0), c(0.17, 0.0));
    assert_eq!(BlockProvider::Leading.coefficient(0, a, m).unwrap(), c(1.0, 0.0));
    assert_eq!(BlockProvider::Leading.coefficient(3, a, m).unwrap(), ZERO);
    let p: Vec<f64> = (0..8).map(|l| BlockProvider::FreeField.coefficient(l, a, ZERO).unwrap().re).collect();
    assert_eq!(p, [1.0, 1.0, 2.0, 3.0, 5.0, 7.0, 11.0, 15.0]);
    assert!(BlockProvider::FreeField.coefficient(0, a, m).is_err());
    let tau = HalfPlanePoint::new(c(0.1, 1.3)).unwrap();
    let b = BlockProvider::FreeField.block(a, ZERO, tau, &ctx()).unwrap();
    // e^{2πiτa²} q^{−1/24} Σ p(ℓ)qˡ
    let q = tau.nome();
    let mut s = ZERO;
    let mut qn = c(1.0, 0.0);
    for l in 0..60 {
        s += BlockProvider::FreeField.coefficient(l, a, ZERO).unwrap() * qn;
        qn *= q;
    }
    let series = (2.0 * PI * I * tau.tau() * (a * a - 1.0 / 24.0)).exp() * s;
    assert!(rel(b, series) < 1e-12);
}

#[test]
fn upsilon_hat_values() {
    let (a, at, nut) = (c(0.23, 0.0), c(0.31, 0.0), c(0.7, 0.0));
    assert!((upsilon_hat(a, at, nut, ZERO, &ctx()).unwrap() - (I * at * nut).exp()).norm() < 1e-12);
    // mpmath at the dual point of (0.23, 1.1, 0.17)
    let (at, nut) = (c(-0.119_080_877_593_073_82, 0.007_860_061_813_130_722), c(2.975_098_885_093_615_8, -1.506_583_860_602_922_7));
    let u = upsilon_hat(a, at, nut, pt().m, &ctx()).unwrap();
    assert!((u - c(0.824_219_266_973_682_9, -0.255_523_399_573_671)).norm() < 1e-12, "{u}");
    let flipped = upsilon_hat(a, -at, -nut, pt().m, &ctx()).unwrap();
    assert!(rel(flipped, u) < 1e-12);
}

#[test]
fn upsilon_full_values() {
    let u = upsilon_full(&pt(), &ctx()).unwrap();
    assert!((u - c(0.950_082_820_118_952_1, -0.288_597_593_797_215)).norm() < 1e-12, "{u}");
    let p0 = MonodromyPoint::real(0.23, 1.1, 0.0);
    assert!(rel(upsilon_full(&p0, &ctx()).unwrap(), (-I * 1.1 * 0.23).exp()) < 1e-12);
    let r = connection_ratio(&pt(), &FlowConfig::default(), &ctx()).unwrap();
    assert!(rel(r.closed_form, (I * PI * 0.17 * 0.17).exp() * u) < 1e-14);
    assert!(r.residual < 1e-3);
}

#[test]
fn generating_function_derivatives() {
    let (at, nu, m) = (c(0.31, 0.0), c(1.1, 0.0), c(0.17, 0.0));
    let d = DualMonodromyPoint::new(at, ZERO, m);
    let a = a_from_dual(&d, nu).unwrap();
    let a = if a.re < 0.0 { -a } else { a };
    let (_, nut) = kernel_coordinates(&KernelPoint::new(a, at, m)).unwrap();
    let g0 = |at: C64, nu: C64| gen_g0(at, nu, m, &ctx()).unwrap();
    let dnu = d5(|s| g0(at, nu + s), 1e-4);
    let dat = d5(|s| g0(at + s, nu), 1e-4);
    assert!((dnu - I * a).norm() < 1e-6, "{dnu} {a}");
    assert!(log_lattice(dat - I * nut) < 1e-6);
    let grad = gen_g0_grad(at, nu, m).unwrap();
    let dm = d5(|s| gen_g0(at, nu, m + s, &ctx()).unwrap(), 1e-4);
    for (an, fd) in grad.iter().zip([dat, dnu, dm]) {
        assert!((an - fd).norm() < 1e-6 * an.norm().max(1.0));
    }
}

#[test]
fn full_generating_function_derivatives() {
    let (d, _) = dual_from_primal(&pt()).unwrap();
    let m = pt().m;
    let g = |a: C64, at: C64| gen_g(a, at, nu_of_a_at(a, at, m).unwrap(), m, &ctx()).unwrap();
    let (a, at) = (pt().a, d.at);
    let nu = nu_of_a_at(a, at, m).unwrap();
    let (_, nut) = kernel_coordinates(&KernelPoint::new(a, at, m)).unwrap();
    let da = d5(|s| g(a + s, at), 1e-4);
    let dat = d5(|s| g(a, at + s), 1e-4);
    assert!((da + I * nu).norm() < 1e-6);
    assert!(log_lattice(dat - I * nut) < 1e-6);
    assert!((gen_g(a, at, nu, m, &ctx()).unwrap() - gen_g0(at, nu, m, &ctx()).unwrap() + I * a * nu).norm() < 1e-15);
}

#[test]
fn generating_function_and_connection_constant() {
    let p = pt();
    let (d, _) = dual_from_primal(&p).unwrap();
    let g0 = gen_g0(d.at, p.nu, p.m, &ctx()).unwrap();
    let [dat, _, dm] = gen_g0_grad(d.at, p.nu, p.m).unwrap();
    let lhs = (-(g0 - d.at * dat - p.m * dm)).exp();
    let rhs = (I * PI * p.m * p.m).exp() * upsilon_hat(p.a, d.at, d.nut, p.m, &ctx()).unwrap();
    assert!(rel(lhs, rhs) < 1e-8);
}

#[test]
fn shift_cocycle() {
    assert!(shift_residual(&pt(), 0, &ctx()).unwrap().norm() < 1e-15);
    for n in [-1, 1, 2, -2] {
        assert!(shift_residual(&pt(), n, &ctx()).unwrap().norm() < 1e-9, "{n}");
    }
}

#[test]
fn c1_kernel_properties() {
    let (a, at) = (c(0.23, 0.0), c(0.31, 0.0));
    let s0 = c1_kernel(&KernelPoint::new(a, at, ZERO), &ctx()).unwrap();
    assert!((s0 - 2f64.sqrt() * (-4.0 * PI * I * a * at).exp()).norm() < 1e-12);
    assert!((s0.norm() - 2f64.sqrt()).abs() < 1e-12);
    let m = c(0.17, 0.0);
    let nu = nu_of_a_at(a, at, m).unwrap();
    let an = dnu_dat(a, at, nu, m).unwrap();
    let fd = d5(|s| nu_of_a_at(a, at + s, m).unwrap(), 1e-4);
    assert!((an - fd).norm() < 1e-7, "{an} {fd}");
    let s = c1_kernel(&KernelPoint::new(a, at, m), &ctx()).unwrap();
    let sm = c1_kernel(&KernelPoint::new(-a, -at, m), &ctx()).unwrap();
    assert!((s.norm() - sm.norm()).abs() < 1e-10, "{s} {sm}");
}

#[test]
fn saddle_point() {
    let p = MonodromyPoint::real(0.2, 1.3, 0.17);
    let (d, _) = dual_from_primal(&p).unwrap();
    let k = KernelPoint::new(p.a, d.at, p.m);
    assert!(saddle_residual(&k, p.nu, &ctx()).unwrap().norm() < 1e-8);
    let e = semiclassical_exponent(&k, p.nu, &ctx()).unwrap();
    let r = I * e + gen_g(k.a, k.at, p.nu, k.m, &ctx()).unwrap() - semiclassical_constant(k.m).unwrap();
    assert!((r - 2.0 * PI * I * (r.im / (2.0 * PI)).round()).norm() < 1e-8);
    let h = 1e-5;
    let slope = (saddle_residual(&k, p.nu + h, &ctx()).unwrap() - saddle_residual(&k, p.nu - h, &ctx()).unwrap()) / (2.0 * h);
    let dnu = 1e-4;
    let off = saddle_residual(&k, p.nu + dnu, &ctx()).unwrap();
    assert!(off.norm() > 1e-7);
    assert!(rel(off, slope * dnu) < 1e-2);
}

#[test]
fn dilog_barnes_relation() {
    assert!(dilog_barnes_residual(c(0.5, 0.0), &ctx()).unwrap().norm() < 1e-12);
    assert!(dilog_barnes_residual(c(0.27, 0.0), &ctx()).unwrap().norm() < 1e-10);
    let x = c(0.37, 0.12);
    let r = dilog_barnes_residual(x, &ctx()).unwrap();
    let rc = dilog_barnes_residual(x.conj(), &ctx()).unwrap();
    assert!((rc - r.conj()).norm() < 1e-11);
}

#[test]
fn zak_sum_free_field() {
    let (a, nu) = (c(0.23, 0.0), c(1.1, 0.0));
    let tau = HalfPlanePoint::new(c(0.0, 3.0)).unwrap();
    let rho = c(0.3, 0.0);
    let p = MonodromyPoint::new(a, nu, ZERO);
    let z = zd_series(&p, tau, rho, BlockProvider::FreeField, 6, &ctx()).unwrap();
    let q = a * tau.tau() + nu / (4.0 * PI);
    let eta = dedekind_eta(tau, &ctx()).unwrap();
    let closed =
        (2.0 * PI * I * a * a * tau.tau()).exp() * theta1(q + rho, tau, 0, &ctx()).unwrap() * theta1(q - rho, tau, 0, &ctx()).unwrap()
            / (eta * eta);
    // the two carry opposite overall signs
    assert!((z.value + closed).norm() < 1e-10);
    let z1 = zd_series(&p, tau, rho + 1.0, BlockProvider::FreeField, 6, &ctx()).unwrap();
    assert!((z1.value - z.value).norm() < 1e-10);
}

#[test]
fn zak_sum_leading_term() {
    let p = MonodromyPoint::real(0.23, 1.1, 0.17);
    let tau = HalfPlanePoint::new(c(0.0, 20.0)).unwrap();
    let z = zd_series(&p, tau, c(0.1, 0.0), BlockProvider::Leading, 6, &ctx()).unwrap();
    assert!((z.value / zd_leading(&p, tau).unwrap() - 1.0).norm() < 1e-6);
}

#[test]
fn kyiv_formula_free_field() {
    let (a, nu) = (c(0.23, 0.0), c(1.1, 0.0));
    let tau = HalfPlanePoint::new(c(0.0, 3.0)).unwrap();
    assert!(kyiv_residual_m0(a, nu, tau, c(0.3, 0.0), &ctx()).unwrap().norm() < 1e-10);
    let q = a * tau.tau() + nu / (4.0 * PI);
    let p = MonodromyPoint::new(a, nu, ZERO);
    let z = zd_series(&p, tau, q, BlockProvider::FreeField, 6, &ctx()).unwrap();
    assert!(z.value.norm() < 1e-10);
    let z6 = zd_series(&p, tau, c(0.3, 0.0), BlockProvider::FreeField, 6, &ctx()).unwrap();
    let z10 = zd_series(&p, tau, c(0.3, 0.0), BlockProvider::FreeField, 10, &ctx()).unwrap();
    assert!((z6.value - z10.value).norm() < 1e-10);
}

#[test]
fn fredholm_determinant_free_field() {
    let tau = HalfPlanePoint::new(c(0.0, 2.0)).unwrap();
    let (q, rho) = (c(0.1, 0.46), c(0.3, 0.0));
    let (prod, th) = fredholm_m0(q, rho, tau, 40, &ctx()).unwrap();
    assert!((prod - th).norm() < 1e-10);
    let (p0, t0) = fredholm_m0(q, q, tau, 40, &ctx()).unwrap();
    assert_eq!(p0, ZERO);
    assert!(t0.norm() < 1e-10);
    let (p20, _) = fredholm_m0(q, rho, tau, 20, &ctx()).unwrap();
    let nome = tau.nome().norm();
    let x = (2.0 * PI * I * (q - rho)).exp().norm().max((2.0 * PI * I * (-q - rho)).exp().norm());
    assert!((p20 - prod).norm() <= 4.0 * prod.norm() * nome.powi(20) * x.max(1.0 / x));
}

#[test]
fn kernel_integral_free_field() {
    let quad = QuadConfig::default();
    let (a, tau) = (c(0.23, 0.0), HalfPlanePoint::new(c(0.0, 1.2)).unwrap());
    assert!(kernel_integral_m0(a, tau, 0.0, &quad, &ctx()).unwrap().norm() < 1e-8);
    let v0 = kernel_integral_raw(a, tau, 0.0, &quad, &ctx()).unwrap();
    let v3 = kernel_integral_raw(a, tau, 0.3, &quad, &ctx()).unwrap();
    assert!(rel(v3, v0) < 1e-8);
    // Gaussian at a = 0: √2 √(−iτ/2) / η(−1/τ)
    let g = kernel_integral_raw(ZERO, tau, 0.0, &quad, &ctx()).unwrap();
    let etad = dedekind_eta(tau.s_dual(), &ctx()).unwrap();
    let closed = 2f64.sqrt() * (-I * tau.tau() / 2.0).sqrt() / etad;
    assert!(rel(g, closed) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dilog_barnes_random(xr in 0.05f64..0.95, xi in -0.2f64..0.2) {
        prop_assert!(dilog_barnes_residual(c(xr, xi), &ctx()).unwrap().norm() < 1e-10);
    }

    #[test]
    fn c1_free_field_random(a in 0.05f64..0.45, at in 0.05f64..0.45) {
        let s = c1_kernel(&KernelPoint::new(c(a, 0.0), c(at, 0.0), ZERO), &ctx()).unwrap();
        prop_assert!((s - 2f64.sqrt() * (-4.0 * PI * I * a * at).exp()).norm() < 1e-12);
    }

    #[test]
    fn upsilon_free_field_random(a in 0.05f64..0.45, nu in 0.2f64..(2.0 * PI - 0.2)) {
        let u = upsilon_full(&MonodromyPoint::real(a, nu, 0.0), &ctx()).unwrap();
        prop_assert!(rel(u, (-I * nu * a).exp()) < 1e-10);
    }

    #[test]
    fn shift_random(a in 0.06f64..0.44, nu in 0.4f64..12.0, m in 0.03f64..0.45) {
        let d = |x: f64| (x - x.round()).abs();
        prop_assume!(d(2.0 * a) > 0.05 && d(2.0 * a - m) > 0.05 && d(2.0 * a + m) > 0.05);
        let p = MonodromyPoint::real(a, nu, m);
        let dual = dual_from_primal(&p);
        prop_assume!(dual.is_ok());
        let at = dual.unwrap().0.at.re;
        prop_assume!(d(2.0 * at - m) > 0.05 && d(2.0 * at + m) > 0.05);
        for n in -2..=2 {
            let r = shift_residual(&p, n, &ctx()).unwrap();
            prop_assert!(r.norm() < 1e-9, "{} {}", n, r);
        }
    }

    #[test]
    fn fredholm_random(u in 0.05f64..0.45, v in 0.1f64..0.4, rho in -0.5f64..0.5, ti in 1.0f64..3.0) {
        let tau = HalfPlanePoint::new(c(0.0, ti)).unwrap();
        let q = c(u, 0.0) + tau.tau() * v;
        let (prod, th) = fredholm_m0(q, c(rho, 0.0), tau, 40, &ctx()).unwrap();
        prop_assert!(rel(prod, th) < 1e-10);
    }
}
