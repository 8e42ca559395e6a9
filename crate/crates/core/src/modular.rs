//! Closed forms on the character variety: the connection constant Υ_S, the
//! generating functions 𝒢₀ and 𝒢, the c = 1 modular kernel and its
//! semiclassical exponent, and the zero-mass Zak, Fredholm and kernel checks.

use crate::charvar::{delta_nu, dual_from_primal, nut_from_traces, trace_coords, MonodromyPoint};
use crate::context::PrecisionContext;
use crate::error::{degenerate, domain, Error, Result};
use crate::numerics::barnes::dln_ghat;
use crate::numerics::gamma::{ln_sin_pi, pi_cot_pi};
use crate::numerics::quad::{integrate, QuadConfig};
use crate::specfun::{barnes_g_ratio4, dedekind_eta, dilog, ln_barnes_g_ratio4, ln_barnes_ghat, theta1, HalfPlanePoint};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const MAX_CUTOFF: usize = 400;

/// Source of the conformal-block coefficients 𝓑_ℓ(a, m) in
/// 𝓑(a, m, τ) = e^{2πiτa²} Σ_ℓ 𝓑_ℓ(a, m) q^ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockProvider {
    /// 𝓑₀ = 1 and nothing else.
    Leading,
    /// m = 0 only: 𝓑 = e^{2πiτa²}/η(τ).
    FreeField,
}

impl BlockProvider {
    /// 𝓑_ℓ. For the free field the series is q^{−1/24}Σ p(ℓ)qˡ, so the
    /// coefficients are partition numbers.
    pub fn coefficient(&self, l: usize, _a: C64, m: C64) -> Result<C64> {
        match self {
            BlockProvider::Leading => Ok(if l == 0 { C64::new(1.0, 0.0) } else { ZERO }),
            BlockProvider::FreeField => {
                free_field_only(m)?;
                Ok(C64::new(partitions(l) as f64, 0.0))
            }
        }
    }

    pub fn block(&self, a: C64, m: C64, tau: HalfPlanePoint, ctx: &PrecisionContext) -> Result<C64> {
        let lead = (2.0 * PI * I * tau.tau() * a * a).exp();
        match self {
            BlockProvider::Leading => Ok(lead),
            BlockProvider::FreeField => {
                free_field_only(m)?;
                Ok(lead / dedekind_eta(tau, ctx)?)
            }
        }
    }
}

fn free_field_only(m: C64) -> Result<()> {
    if m != ZERO {
        return Err(domain("BlockProvider", "free_field blocks exist only at m = 0"));
    }
    Ok(())
}

fn partitions(n: usize) -> u64 {
    let mut p = vec![0u64; n + 1];
    p[0] = 1;
    for k in 1..=n {
        for j in k..=n {
            p[j] += p[j - k];
        }
    }
    p[n]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub a: C64,
    pub at: C64,
    pub m: C64,
    /// Imaginary offset of the integration contour.
    pub lambda: f64,
}

impl KernelPoint {
    pub fn new(a: C64, at: C64, m: C64) -> Self {
        Self { a, at, m, lambda: 0.0 }
    }
}

fn lg_hat(x: C64) -> Result<C64> {
    ln_barnes_ghat(x)
}

/// ln Υ̂_S.
pub fn ln_upsilon_hat(a: C64, at: C64, nut: C64, m: C64) -> Result<C64> {
    let q = nut / (4.0 * PI);
    Ok(I * at * nut + lg_hat(a - m / 2.0 + q)? + lg_hat(a - m / 2.0 - q)? - lg_hat(a + m / 2.0 + q)? - lg_hat(a + m / 2.0 - q)?
        + m * (2.0 * PI).ln()
        + lg_hat(m)?
        - I * PI * m * m / 2.0)
}

/// Υ̂_S = e^{iãν̃} Ĝ(a−m/2+ν̃/4π)Ĝ(a−m/2−ν̃/4π)/(Ĝ(a+m/2+ν̃/4π)Ĝ(a+m/2−ν̃/4π)) (2π)^m Ĝ(m) e^{−iπm²/2}.
pub fn upsilon_hat(a: C64, at: C64, nut: C64, m: C64, _ctx: &PrecisionContext) -> Result<C64> {
    Ok(ln_upsilon_hat(a, at, nut, m)?.exp())
}

/// Υ_S(a, ν, m), the Barnes prefactor times Υ̂_S at the dual point.
pub fn upsilon_full(p: &MonodromyPoint, ctx: &PrecisionContext) -> Result<C64> {
    let (d, _) = dual_from_primal(p)?;
    Ok(barnes_g_ratio4(p.a, d.at, p.m, ctx)? * upsilon_hat(p.a, d.at, d.nut, p.m, ctx)?)
}

pub fn ln_upsilon_full(p: &MonodromyPoint) -> Result<C64> {
    let (d, _) = dual_from_primal(p)?;
    Ok(ln_barnes_g_ratio4(p.a, d.at, p.m)? + ln_upsilon_hat(p.a, d.at, d.nut, p.m)?)
}

/// 𝒢₀(ã, ν, m), with x^x-type factors as exp(x ln sin πx) on the principal log.
pub fn gen_g0(at: C64, nu: C64, m: C64, _ctx: &PrecisionContext) -> Result<C64> {
    let q = nu / (4.0 * PI);
    let h = m / 2.0;
    let mut lg = -I * PI * m * m / 2.0 - lg_hat(m)? - m * sin_log(m)? + lg_hat(h + at + q)? + lg_hat(h + at - q)?
        - lg_hat(at - h + q)?
        - lg_hat(at - h - q)?;
    for e in [1.0, -1.0] {
        for f in [1.0, -1.0] {
            let x = h + e * at + f * q;
            lg += x * sin_log(x)?;
        }
    }
    Ok(-lg)
}

/// (∂_ã, ∂_ν, ∂_m) 𝒢₀ in closed form.
pub fn gen_g0_grad(at: C64, nu: C64, m: C64) -> Result<[C64; 3]> {
    let q = nu / (4.0 * PI);
    let h = m / 2.0;
    let dx = |x: C64| -> Result<C64> { Ok(sin_log(x)? + x * pi_cot_pi(x)) };
    let g = |x: C64| -> Result<C64> {
        if x.im == 0.0 && x.re != 0.0 && x.re == x.re.round() {
            return Err(Error::Pole { op: "gen_g0_grad", at: x });
        }
        Ok(dln_ghat(x))
    };
    let (gpp, gpm, gmp, gmm) = (g(h + at + q)?, g(h + at - q)?, g(at - h + q)?, g(at - h - q)?);
    let mut d_at = gpp + gpm - gmp - gmm;
    let mut d_q = gpp - gpm - gmp + gmm;
    let mut d_m = -I * PI * m - g(m)? - dx(m)? + 0.5 * (gpp + gpm + gmp + gmm);
    for e in [1.0, -1.0] {
        for f in [1.0, -1.0] {
            let d = dx(h + e * at + f * q)?;
            d_at += e * d;
            d_q += f * d;
            d_m += 0.5 * d;
        }
    }
    Ok([-d_at, -d_q / (4.0 * PI), -d_m])
}

fn sin_log(x: C64) -> Result<C64> {
    let s = (PI * x).sin();
    if s.norm() < 1e-300 {
        return Err(Error::Pole { op: "gen_g0", at: x });
    }
    let n = x.re.floor();
    let sgn = if x.im < 0.0 { -1.0 } else { 1.0 };
    Ok(ln_sin_pi(x - n) - I * PI * n * sgn)
}

/// 𝒢 = 𝒢₀ − iaν.
pub fn gen_g(a: C64, at: C64, nu: C64, m: C64, ctx: &PrecisionContext) -> Result<C64> {
    Ok(gen_g0(at, nu, m, ctx)? - I * a * nu)
}

/// ν(a, ã, m): the root w = e^{iν/2} of s₊w² − 2cos(2πã)w + s₋ = 0 closest
/// to e^{2πiã}.
pub fn nu_of_a_at(a: C64, at: C64, m: C64) -> Result<C64> {
    const OP: &str = "nu_of_a_at";
    let s = (2.0 * PI * a).sin();
    if s.norm() < 1e-12 {
        return Err(degenerate(OP, "sin 2πa vanishes"));
    }
    let sp = (PI * (2.0 * a + m)).sin() / s;
    let sm = (PI * (2.0 * a - m)).sin() / s;
    if sp.norm() < 1e-14 {
        return Err(degenerate(OP, "sin π(2a+m) vanishes"));
    }
    let b = 2.0 * (2.0 * PI * at).cos();
    let disc = (b * b - 4.0 * sp * sm).sqrt();
    let target = (2.0 * PI * I * at).exp();
    let roots = [(b + disc) / (2.0 * sp), (b - disc) / (2.0 * sp)];
    let w = if (roots[0] - target).norm() <= (roots[1] - target).norm() { roots[0] } else { roots[1] };
    Ok(-2.0 * I * w.ln())
}

/// ∂ν/∂ã at fixed a, m, from differentiating 2cos 2πã = B(a, ν, m).
pub fn dnu_dat(a: C64, at: C64, nu: C64, m: C64) -> Result<C64> {
    let s = (2.0 * PI * a).sin();
    let sp = (PI * (2.0 * a + m)).sin() / s;
    let sm = (PI * (2.0 * a - m)).sin() / s;
    let db = -I / 2.0 * (-I * nu / 2.0).exp() * sm + I / 2.0 * (I * nu / 2.0).exp() * sp;
    if db.norm() < 1e-10 {
        return Err(degenerate("c1_kernel", "∂B/∂ν vanishes (critical point)"));
    }
    Ok(-4.0 * PI * (2.0 * PI * at).sin() / db)
}

/// ν and ν̃ for a kernel point.
pub fn kernel_coordinates(k: &KernelPoint) -> Result<(C64, C64)> {
    let nu = nu_of_a_at(k.a, k.at, k.m)?;
    let t = trace_coords(&MonodromyPoint::new(k.a, nu, k.m))?;
    Ok((nu, nut_from_traces(&t, k.at, k.m)?))
}

/// S(a, ã) = (√2/4π)(∂ν/∂ã)Υ̂_S(a, ã).
pub fn c1_kernel(k: &KernelPoint, ctx: &PrecisionContext) -> Result<C64> {
    let (nu, nut) = kernel_coordinates(k)?;
    let d = dnu_dat(k.a, k.at, nu, k.m)?;
    Ok(2f64.sqrt() / (4.0 * PI) * d * upsilon_hat(k.a, k.at, nut, k.m, ctx)?)
}

/// Υ̂_S(ã+n/2, a) − e^{iν̃n/2}Υ̂_S(ã, a), with ν and ν̃ recomputed at the
/// shifted ã.
pub fn shift_residual(p: &MonodromyPoint, n: i32, ctx: &PrecisionContext) -> Result<C64> {
    let (d, _) = dual_from_primal(p)?;
    let base = upsilon_hat(p.a, d.at, d.nut, p.m, ctx)?;
    let at_n = d.at + n as f64 / 2.0;
    let nu_n = p.nu + 2.0 * PI * n as f64;
    let t = trace_coords(&MonodromyPoint::new(p.a, nu_n, p.m))?;
    let nut_n = nut_from_traces(&t, at_n, p.m)?;
    let shifted = upsilon_hat(p.a, at_n, nut_n, p.m, ctx)?;
    Ok(shifted - (I * d.nut * n as f64 / 2.0).exp() * base)
}

fn four_points(k: &KernelPoint, nu: C64) -> [(f64, C64); 4] {
    let q = nu / (4.0 * PI);
    let h = k.m / 2.0;
    [(1.0, h + k.at + q), (-1.0, h + k.at - q), (1.0, h - k.at + q), (-1.0, h - k.at - q)]
}

/// aν + (1/2π)[Σ Li₂(e^{2πix}) − (π²/3)(3m² − 6m + 12ã² + 2) − ν²/4],
/// x = m/2 ± ã ± ν/4π.
pub fn semiclassical_exponent(k: &KernelPoint, nu: C64, ctx: &PrecisionContext) -> Result<C64> {
    let mut s = ZERO;
    for (_, x) in four_points(k, nu) {
        s += dilog((2.0 * PI * I * x).exp(), None, ctx)?;
    }
    let (m, at) = (k.m, k.at);
    Ok(k.a * nu + (s - PI * PI / 3.0 * (3.0 * m * m - 6.0 * m + 12.0 * at * at + 2.0) - nu * nu / 4.0) / (2.0 * PI))
}

/// ∂/∂ν of the semiclassical exponent, reduced modulo ½ (the logarithms in
/// the derivative are defined up to that).
pub fn saddle_residual(k: &KernelPoint, nu: C64, _ctx: &PrecisionContext) -> Result<C64> {
    let mut s = ZERO;
    for (f, x) in four_points(k, nu) {
        let e = (2.0 * PI * I * x).exp();
        if e.im == 0.0 && e.re >= 1.0 {
            return Err(Error::Cut { op: "saddle_residual", at: e });
        }
        s += f * (-I / 2.0) * (1.0 - e).ln();
    }
    let r = k.a + (s - nu / 2.0) / (2.0 * PI);
    Ok(r - (2.0 * r.re).round() / 2.0)
}

/// iE + 𝒢 at the saddle: ln Ĝ(m) + m ln sin πm − 2m ln π + iπm²/2.
pub fn semiclassical_constant(m: C64) -> Result<C64> {
    Ok(lg_hat(m)? + m * sin_log(m)? - 2.0 * m * PI.ln() + I * PI * m * m / 2.0)
}

/// Li₂(e^{2πix}) + 2πi ln Ĝ(x) + 2πi x ln(sin πx/π) + π²x(1−x) − π²/6.
pub fn dilog_barnes_residual(x: C64, ctx: &PrecisionContext) -> Result<C64> {
    let e = (2.0 * PI * I * x).exp();
    let li = dilog(e, None, ctx)?;
    Ok(li + 2.0 * PI * I * lg_hat(x)? + 2.0 * PI * I * x * (sin_log(x)? - PI.ln()) + PI * PI * x * (1.0 - x) - PI * PI / 6.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZakSum {
    pub value: C64,
    /// Sum of |terms| on the outermost ring kept.
    pub tail: f64,
    pub cutoff: usize,
}

/// Z_D = η⁻¹ Σ_{n,k} e^{in(ν+δν)/2} e^{2πiτc²} e^{4πic(ρ+½)} 𝓑(a+n/2, m, τ),
/// c = k + n/2 + ½, with ν+δν = 4πη. The cutoff is raised until the
/// outer ring falls below tolerance.
pub fn zd_series(
    p: &MonodromyPoint,
    tau: HalfPlanePoint,
    rho: C64,
    provider: BlockProvider,
    cutoff: usize,
    ctx: &PrecisionContext,
) -> Result<ZakSum> {
    let nup = p.nu + delta_nu(p.a, p.m)?;
    let t = tau.tau();
    let eta = dedekind_eta(tau, ctx)?;
    let term = |n: i64, k: i64| -> Result<C64> {
        let c = k as f64 + n as f64 / 2.0 + 0.5;
        let b = provider.block(p.a + n as f64 / 2.0, p.m, tau, ctx)?;
        Ok((I * n as f64 * nup / 2.0 + 2.0 * PI * I * t * c * c + 4.0 * PI * I * c * (rho + 0.5)).exp() * b)
    };
    let mut n_cut = cutoff.max(1);
    loop {
        let nn = n_cut as i64;
        let mut sum = ZERO;
        let mut ring = 0.0;
        for n in -nn..=nn {
            for k in -nn..=nn {
                let v = term(n, k)?;
                sum += v;
                if n.abs() == nn || k.abs() == nn {
                    ring += v.norm();
                }
            }
        }
        if ring <= ctx.series_tol() * (1.0 + sum.norm()) {
            return Ok(ZakSum { value: sum / eta, tail: ring / eta.norm(), cutoff: n_cut });
        }
        if n_cut >= MAX_CUTOFF {
            return Err(Error::Convergence { op: "zd_series", terms: n_cut });
        }
        n_cut = (2 * n_cut).min(MAX_CUTOFF);
    }
}

/// Dominant (k, n) = (0, −1) term of Z_D at the i∞ cusp for the leading
/// provider: e^{−iπτ/12} e^{−i(ν+δν)/2} e^{2πiτa²} e^{−2πiτa} e^{iπτ/2}.
pub fn zd_leading(p: &MonodromyPoint, tau: HalfPlanePoint) -> Result<C64> {
    let t = tau.tau();
    let nup = p.nu + delta_nu(p.a, p.m)?;
    Ok((-I * PI * t / 12.0 - I * nup / 2.0 + 2.0 * PI * I * t * p.a * p.a - 2.0 * PI * I * t * p.a + I * PI * t / 2.0).exp())
}

/// η⁻²e^{2πia²τ}θ1(Q+ρ)θ1(Q−ρ) + Z_D with the free-field provider,
/// Q = aτ + ν/4π. Z_D carries the opposite overall sign.
pub fn kyiv_residual_m0(a: C64, nu: C64, tau: HalfPlanePoint, rho: C64, ctx: &PrecisionContext) -> Result<C64> {
    let p = MonodromyPoint::new(a, nu, ZERO);
    let q = a * tau.tau() + nu / (4.0 * PI);
    let eta = dedekind_eta(tau, ctx)?;
    let lhs = (2.0 * PI * I * a * a * tau.tau()).exp() * theta1(q + rho, tau, 0, ctx)? * theta1(q - rho, tau, 0, ctx)? / (eta * eta);
    Ok(lhs + zd_series(&p, tau, rho, BlockProvider::FreeField, 6, ctx)?.value)
}

/// det(1 − K) at m = 0 as the truncated product and as
/// −q^{−1/6}η⁻²e^{−2πiρ}θ1(ρ+Q)θ1(ρ−Q).
pub fn fredholm_m0(q: C64, rho: C64, tau: HalfPlanePoint, cutoff: usize, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    let nome = tau.nome();
    let mut prod = C64::new(1.0, 0.0);
    let mut tail = 0.0f64;
    for e in [1.0, -1.0] {
        let x = (2.0 * PI * I * (e * q - rho)).exp();
        let mut qn = C64::new(1.0, 0.0);
        for n in 0..=cutoff {
            prod *= 1.0 - qn * x;
            if n >= 1 {
                prod *= 1.0 - qn / x;
            }
            qn *= nome;
        }
        tail = tail.max((qn * x).norm()).max((qn / x).norm());
    }
    if tail > ctx.series_tol() {
        return Err(Error::Convergence { op: "fredholm_m0", terms: cutoff });
    }
    let eta = dedekind_eta(tau, ctx)?;
    let theta = -(-2.0 * PI * I * tau.tau() / 6.0 - 2.0 * PI * I * rho).exp() / (eta * eta)
        * theta1(rho + q, tau, 0, ctx)?
        * theta1(rho - q, tau, 0, ctx)?;
    Ok((prod, theta))
}

/// ∫ dã √2 e^{−2πiã²/τ} e^{−4πiaã}/η(−1/τ) along Im ã = Λ.
pub fn kernel_integral_raw(a: C64, tau: HalfPlanePoint, lambda: f64, quad: &QuadConfig, ctx: &PrecisionContext) -> Result<C64> {
    const OP: &str = "kernel_integral_m0";
    let t = tau.tau();
    let c = -2.0 * PI * I / t;
    if !(c.re < 0.0) {
        return Err(domain(OP, "integrand does not decay along the contour"));
    }
    let lin = -4.0 * PI * I * a;
    let f = |x: f64| {
        let z = C64::new(x, lambda);
        (c * z * z + lin * z).exp()
    };
    // along the contour ln|f| = Re(c)x² + bx + k; integrate where it is within
    // ln(tol·1e-4) of its maximum and measure the error against that maximum
    let z0 = C64::new(0.0, lambda);
    let b = (2.0 * c * z0 + lin).re;
    let x_star = -b / (2.0 * c.re);
    let g_max = (c * z0 * z0 + lin * z0).re + c.re * x_star * x_star + b * x_star;
    let width = (-(ctx.series_tol() * 1e-4).ln() / -c.re).sqrt() + 1.0;
    let scale = g_max.exp() * (PI / -c.re).sqrt();
    let cfg = QuadConfig { abs_tol: quad.abs_tol.max(quad.rel_tol * scale), ..*quad };
    let (val, _) = integrate(f, x_star - width, x_star + width, &cfg)?;
    let etad = dedekind_eta(tau.s_dual(), ctx)?;
    Ok(2f64.sqrt() * val / etad)
}

/// (∫ 𝓑(ã,0,τ̃-form) S(a,ã) dã)/𝓑(a,0,τ) − 1.
pub fn kernel_integral_m0(a: C64, tau: HalfPlanePoint, lambda: f64, quad: &QuadConfig, ctx: &PrecisionContext) -> Result<C64> {
    let lhs = kernel_integral_raw(a, tau, lambda, quad, ctx)?;
    let rhs = BlockProvider::FreeField.block(a, ZERO, tau, ctx)?;
    Ok(lhs / rhs - 1.0)
}
