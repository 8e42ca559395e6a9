//! Theta, eta and Weierstrass functions on the torus with periods 1 and τ,
//! plus the hypergeometric, Barnes and dilogarithm wrappers used elsewhere.

use crate::context::PrecisionContext;
use crate::error::{domain, Error, Result};
use crate::numerics::barnes::{ln_barnes_g1p, ln_ghat};
use crate::numerics::dilog::{li2_side, CutSide};
use crate::numerics::gamma::ln_sin_pi;
use crate::numerics::hyp2f1;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);

/// A point of the upper half-plane, arg τ ∈ (0, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint(C64);

impl HalfPlanePoint {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.is_finite() {
            return Err(domain("HalfPlanePoint", format!("Im tau must be positive, got {tau}")));
        }
        Ok(Self(tau))
    }

    pub fn tau(&self) -> C64 {
        self.0
    }

    /// τ̃ = −1/τ.
    pub fn s_dual(&self) -> Self {
        Self(-1.0 / self.0)
    }

    /// e^{2πiτ}.
    pub fn nome(&self) -> C64 {
        (2.0 * PI * I * self.0).exp()
    }
}

/// θ1 and its first three z-derivatives, each divided by e^{scale}.
#[derive(Debug, Clone, Copy)]
pub struct ThetaJet {
    pub d: [C64; 4],
    pub scale: f64,
}

impl ThetaJet {
    pub fn value(&self, order: usize) -> C64 {
        self.d[order] * self.scale.exp()
    }

    /// θ^{(k)}/θ.
    pub fn log_ratio(&self, order: usize) -> C64 {
        self.d[order] / self.d[0]
    }
}

/// Summed outward from the dominant index so the result is scaled to O(1).
pub fn theta1_jet(z: C64, tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<ThetaJet> {
    let t = tau.tau();
    let kstar = -z.im / t.im;
    let n_right = (kstar - 0.5).ceil() as i64;
    let n_left = n_right - 1;
    let expo = |n: i64| {
        let k = n as f64 + 0.5;
        I * PI * t * k * k + 2.0 * PI * I * k * z
    };
    let scale = expo(n_left).re.max(expo(n_right).re);
    let mut d = [C64::new(0.0, 0.0); 4];
    let tol = ctx.series_tol();
    let add = |n: i64, d: &mut [C64; 4]| -> f64 {
        let k = n as f64 + 0.5;
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let w = (expo(n) - scale).exp() * sign;
        let f = 2.0 * PI * I * k;
        let mut p = -I * w;
        for dj in d.iter_mut() {
            *dj += p;
            p *= f;
        }
        w.norm() * (1.0 + 2.0 * PI * k.abs()).powi(3)
    };
    for j in 0..ctx.term_budget() as i64 {
        let r = add(n_right + j, &mut d);
        let l = add(n_left - j, &mut d);
        if j >= 2 && 2.0 * (r + l) < tol {
            return Ok(ThetaJet { d, scale });
        }
    }
    Err(Error::Convergence { op: "theta1", terms: ctx.term_budget() })
}

/// z-derivative of order 0..=3 of θ1(z|τ) = −iΣ(−1)^n q^{(n+½)²/2} e^{2πi(n+½)z}.
pub fn theta1(z: C64, tau: HalfPlanePoint, deriv_order: usize, ctx: &PrecisionContext) -> Result<C64> {
    if deriv_order > 3 {
        return Err(domain("theta1", format!("deriv_order {deriv_order} not in 0..=3")));
    }
    Ok(theta1_jet(z, tau, ctx)?.value(deriv_order))
}

/// η(τ) = q^{1/24}∏(1 − qⁿ).
pub fn dedekind_eta(tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<C64> {
    let q = tau.nome();
    let mut prod = C64::new(1.0, 0.0);
    let mut qn = q;
    for _ in 0..ctx.term_budget() {
        if qn.norm() < ctx.series_tol() * 1e-2 {
            return Ok((2.0 * PI * I * tau.tau() / 24.0).exp() * prod);
        }
        prod *= 1.0 - qn;
        qn *= q;
    }
    Err(Error::Convergence { op: "dedekind_eta", terms: ctx.term_budget() })
}

/// η1(τ) = −θ1'''(0)/(6θ1'(0)).
pub fn eta1_const(tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<C64> {
    let j = theta1_jet(C64::new(0.0, 0.0), tau, ctx)?;
    Ok(-j.d[3] / (6.0 * j.d[1]))
}

/// η1 evaluated through τ ↦ −1/τ when Im τ < 1, where the direct series
/// loses accuracy.
pub fn eta1_reduced(tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<C64> {
    if tau.tau().im >= 1.0 {
        return eta1_const(tau, ctx);
    }
    let td = tau.s_dual();
    let t = td.tau();
    Ok(t * t * eta1_const(td, ctx)? - I * PI * t)
}

/// Reduces z into the period parallelogram centred at the origin.
pub fn reduce_to_cell(z: C64, tau: C64) -> C64 {
    let n = (z.im / tau.im).round();
    let w = z - tau * n;
    w - w.re.round()
}

/// |θ1(z)/θ1'(0)|, which behaves like the distance from z to the lattice
/// independently of the size of the nome.
fn lattice_proximity(j: &ThetaJet, tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<f64> {
    let j0 = theta1_jet(C64::new(0.0, 0.0), tau, ctx)?;
    Ok(j.d[0].norm() / j0.d[1].norm() * (j.scale - j0.scale).exp())
}

/// ℘ (order 0) or ℘' (order 1) as −(log θ1)'' − 2η1 and its derivative.
pub fn weierstrass(z: C64, tau: HalfPlanePoint, order: usize, ctx: &PrecisionContext) -> Result<C64> {
    if order > 1 {
        return Err(domain("weierstrass", format!("order {order} not in 0..=1")));
    }
    let w = reduce_to_cell(z, tau.tau());
    let j = theta1_jet(w, tau, ctx)?;
    if lattice_proximity(&j, tau, ctx)? < ctx.pole_threshold {
        return Err(Error::Pole { op: "weierstrass", at: z });
    }
    let r1 = j.log_ratio(1);
    let r2 = j.log_ratio(2);
    if order == 0 {
        let l2 = r2 - r1 * r1;
        Ok(-l2 - 2.0 * eta1_const(tau, ctx)?)
    } else {
        let r3 = j.log_ratio(3);
        Ok(-(r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1))
    }
}

/// ℘ and ℘' through ℘(z|τ) = τ̃²℘(zτ̃|τ̃) when Im τ < 1.
pub fn weierstrass_reduced(z: C64, tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    if tau.tau().im >= 1.0 {
        return Ok((weierstrass(z, tau, 0, ctx)?, weierstrass(z, tau, 1, ctx)?));
    }
    let td = tau.s_dual();
    let t = td.tau();
    let w = z * t;
    Ok((t * t * weierstrass(w, td, 0, ctx)?, t * t * t * weierstrass(w, td, 1, ctx)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LameKind {
    X,
    Y,
}

/// x(ξ, z) = θ1(z−ξ)θ1'(0)/(θ1(z)θ1(ξ)); kind Y is ∂_ξ x.
pub fn lame(xi: C64, z: C64, tau: HalfPlanePoint, kind: LameKind, ctx: &PrecisionContext) -> Result<C64> {
    let jz = theta1_jet(z, tau, ctx)?;
    let jx = theta1_jet(xi, tau, ctx)?;
    let jd = theta1_jet(z - xi, tau, ctx)?;
    let j0 = theta1_jet(C64::new(0.0, 0.0), tau, ctx)?;
    if lattice_proximity(&jz, tau, ctx)? < ctx.pole_threshold {
        return Err(Error::Pole { op: "lame", at: z });
    }
    if lattice_proximity(&jx, tau, ctx)? < ctx.pole_threshold {
        return Err(Error::Pole { op: "lame", at: xi });
    }
    let x = jd.d[0] * j0.d[1] / (jz.d[0] * jx.d[0]) * (jd.scale + j0.scale - jz.scale - jx.scale).exp();
    match kind {
        LameKind::X => Ok(x),
        LameKind::Y => Ok(x * (-jd.log_ratio(1) - jx.log_ratio(1))),
    }
}

/// ₂F₁(a, b; c; x) on the principal sheet.
pub fn gauss_2f1(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<C64> {
    hyp2f1::hyp2f1(a, b, c, x, ctx)
}

fn is_integer(x: C64) -> bool {
    x.im == 0.0 && x.re == x.re.round()
}

/// ln Ĝ(x) = ln G(1+x) − ln G(1−x).
pub fn ln_barnes_ghat(x: C64) -> Result<C64> {
    if x == C64::new(0.0, 0.0) {
        return Ok(x);
    }
    if is_integer(x) {
        return Err(Error::Pole { op: "barnes_ghat", at: x });
    }
    Ok(ln_ghat(x))
}

/// Ĝ(x) = G(1+x)/G(1−x).
pub fn barnes_ghat(x: C64, _ctx: &PrecisionContext) -> Result<C64> {
    Ok(ln_barnes_ghat(x)?.exp())
}

fn ln_g1p_checked(z: C64, op: &'static str) -> Result<C64> {
    if z.im == 0.0 && z.re <= -1.0 && z.re == z.re.round() {
        return Err(Error::Pole { op, at: z + 1.0 });
    }
    Ok(ln_barnes_g1p(z))
}

/// ln of G(1+2a)G(1−2a)/(G(1−m+2a)G(1−m−2a)) · G(1−m+2ã)G(1−m−2ã)/(G(1+2ã)G(1−2ã)).
pub fn ln_barnes_g_ratio4(a: C64, at: C64, m: C64) -> Result<C64> {
    const OP: &str = "barnes_g_ratio4";
    let half = |x: C64| -> Result<C64> {
        Ok(ln_g1p_checked(2.0 * x, OP)? + ln_g1p_checked(-2.0 * x, OP)?
            - ln_g1p_checked(2.0 * x - m, OP)?
            - ln_g1p_checked(-2.0 * x - m, OP)?)
    };
    Ok(half(a)? - half(at)?)
}

pub fn barnes_g_ratio4(a: C64, at: C64, m: C64, _ctx: &PrecisionContext) -> Result<C64> {
    Ok(ln_barnes_g_ratio4(a, at, m)?.exp())
}

/// Li₂(z); points on (1, ∞) need an explicit side.
pub fn dilog(z: C64, side: Option<CutSide>, _ctx: &PrecisionContext) -> Result<C64> {
    let on_cut = z.im == 0.0 && z.re > 1.0;
    match (on_cut, side) {
        (true, None) => Err(Error::Cut { op: "dilog", at: z }),
        (_, Some(s)) => Ok(li2_side(z, s)),
        (false, None) => Ok(li2_side(z, CutSide::Above)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoubleSineForm {
    /// (i/4π)[Li₂(e^{2πix}) − Li₂(e^{−2πix})]
    Dilog,
    /// ln[Ĝ(x)(sin πx/π)^x]
    Ghat,
    /// (i/2π)[Li₂(e^{2πix}) − π²/6 − π²x(x−1)]
    Class,
}

/// Coefficient of 1/b² in ln S_b(x/b) as b → 0.
pub fn double_sine_asymp(x: C64, form: DoubleSineForm, _ctx: &PrecisionContext) -> Result<C64> {
    if is_integer(x) {
        return Err(Error::Pole { op: "double_sine_asymp", at: x });
    }
    let e = (2.0 * PI * I * x).exp();
    Ok(match form {
        DoubleSineForm::Dilog => I / (4.0 * PI) * (li2_side(e, CutSide::Above) - li2_side(1.0 / e, CutSide::Above)),
        DoubleSineForm::Ghat => ln_ghat(x) + x * (ln_sin_pi(x) - PI.ln()),
        DoubleSineForm::Class => I / (2.0 * PI) * (li2_side(e, CutSide::Above) - PI * PI / 6.0 - PI * PI * x * (x - 1.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn hp(re: f64, im: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(c(re, im)).unwrap()
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(HalfPlanePoint::new(c(0.1, -1.0)).is_err());
    }

    #[test]
    fn theta_zero_and_odd() {
        let ctx = PrecisionContext::default();
        assert!(theta1(c(0.0, 0.0), hp(0.0, 2.0), 0, &ctx).unwrap().norm() < 1e-16);
        let z = c(0.2, 0.1);
        let t = hp(0.0, 1.5);
        let s = theta1(z, t, 0, &ctx).unwrap() + theta1(-z, t, 0, &ctx).unwrap();
        assert!(s.norm() < 1e-15);
    }

    #[test]
    fn eta_leading_term() {
        let ctx = PrecisionContext::default();
        let e = dedekind_eta(hp(0.0, 10.0), &ctx).unwrap();
        let lead = (-10.0 * PI / 12.0).exp();
        assert!((e.re / lead - 1.0).abs() < 1e-12 && e.im.abs() < 1e-20);
    }

    #[test]
    fn eta1_at_large_height() {
        let ctx = PrecisionContext::default();
        let v = eta1_const(hp(0.0, 20.0), &ctx).unwrap();
        assert!((v - PI * PI / 6.0).norm() < 1e-10);
    }

    #[test]
    fn eta1_at_i() {
        // self-dual point: η1(i) = π/2
        let ctx = PrecisionContext::default();
        let v = eta1_const(hp(0.0, 1.0), &ctx).unwrap();
        assert!((v - PI / 2.0).norm() < 1e-13);
    }

    #[test]
    fn weierstrass_parity_and_laurent() {
        let ctx = PrecisionContext::default();
        let t = hp(0.0, 1.2);
        let z = c(0.21, 0.13);
        let p = weierstrass(z, t, 0, &ctx).unwrap();
        assert!((p - weierstrass(-z, t, 0, &ctx).unwrap()).norm() < 1e-12);
        let d = weierstrass(z, t, 1, &ctx).unwrap();
        assert!((d + weierstrass(-z, t, 1, &ctx).unwrap()).norm() < 1e-12);
        let z0 = c(1e-3, 0.0);
        let l = weierstrass(z0, hp(0.0, 1.0), 0, &ctx).unwrap();
        assert!((z0 * z0 * l - 1.0).norm() < 1e-6);
    }

    #[test]
    fn weierstrass_pole_error() {
        let ctx = PrecisionContext::default();
        assert!(matches!(weierstrass(c(1.0, 0.0), hp(0.0, 1.0), 0, &ctx), Err(Error::Pole { .. })));
    }

    #[test]
    fn ghat_reciprocal() {
        let ctx = PrecisionContext::default();
        let x = c(0.3, 0.2);
        let p = barnes_ghat(x, &ctx).unwrap() * barnes_ghat(-x, &ctx).unwrap();
        assert!((p - 1.0).norm() < 1e-12);
        assert_eq!(barnes_ghat(c(0.0, 0.0), &ctx).unwrap(), c(1.0, 0.0));
        assert!(barnes_ghat(c(2.0, 0.0), &ctx).is_err());
    }

    #[test]
    fn dilog_cut_needs_side() {
        let ctx = PrecisionContext::default();
        assert!(matches!(dilog(c(2.0, 0.0), None, &ctx), Err(Error::Cut { .. })));
        assert!(dilog(c(2.0, 0.0), Some(CutSide::Below), &ctx).is_ok());
    }
}
