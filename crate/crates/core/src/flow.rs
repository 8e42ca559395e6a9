//! The non-autonomous elliptic Calogero–Moser system
//! 2πi dQ/dτ = P, 2πi dP/dτ = m²℘'(2Q|τ), integrated along straight paths in
//! the upper half-plane together with log 𝒯 = ∫ H dτ/2πi.

use crate::charvar::{delta_nu, dual_from_primal, eta_of_nu, eta_tilde, DualMonodromyPoint, MonodromyPoint};
use crate::context::PrecisionContext;
use crate::error::{domain, Error, Result};
use crate::modular::upsilon_full;
use crate::numerics::ode::{dopri5, RkConfig, RkStats};
use crate::specfun::{eta1_const, eta1_reduced, weierstrass, weierstrass_reduced, HalfPlanePoint};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);
const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub tau: C64,
    pub q: C64,
    pub p: C64,
    pub log_tau: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub t_max: f64,
    pub eps: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Abort when |θ1(2Q|τ)| drops below this.
    pub pole_threshold: f64,
    pub max_steps: usize,
    /// Largest admissible leading correction |e^{2πia·τ₀}| at the start cusp.
    pub cusp_tol: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { t_max: 8.0, eps: 0.02, rtol: 1e-10, atol: 1e-12, pole_threshold: 1e-6, max_steps: 200_000, cusp_tol: 1e-2 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 1.0 && 1.0 > self.eps && self.eps > 0.0) {
            return Err(domain("FlowConfig", format!("need T_max > 1 > eps > 0, got {} and {}", self.t_max, self.eps)));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.pole_threshold > 0.0 && self.max_steps > 0) {
            return Err(domain("FlowConfig", "tolerances and max_steps must be positive"));
        }
        Ok(())
    }

    fn rk(&self) -> RkConfig {
        RkConfig { rtol: self.rtol, atol: self.atol, max_steps: self.max_steps, ..RkConfig::default() }
    }

    fn ctx(&self, ctx: &PrecisionContext) -> PrecisionContext {
        PrecisionContext { pole_threshold: self.pole_threshold, ..*ctx }
    }
}

/// H = P² − m²℘(2Q|τ) − 2m²η1(τ), with the plain theta series.
pub fn hamiltonian(q: C64, p: C64, tau: HalfPlanePoint, m: C64, ctx: &PrecisionContext) -> Result<C64> {
    if m == C64::new(0.0, 0.0) {
        return Ok(p * p);
    }
    let m2 = m * m;
    Ok(p * p - m2 * weierstrass(2.0 * q, tau, 0, ctx)? - 2.0 * m2 * eta1_const(tau, ctx)?)
}

/// H evaluated through τ ↦ −1/τ when Im τ < 1.
fn hamiltonian_reduced(q: C64, p: C64, tau: HalfPlanePoint, m: C64, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    let m2 = m * m;
    let (wp, wpp) = weierstrass_reduced(2.0 * q, tau, ctx)?;
    Ok((p * p - m2 * wp - 2.0 * m2 * eta1_reduced(tau, ctx)?, wpp))
}

/// (dQ/dτ, dP/dτ).
pub fn rhs(s: &FlowState, m: C64, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    let tau = HalfPlanePoint::new(s.tau)?;
    let dq = s.p / TWO_PI_I;
    if m == C64::new(0.0, 0.0) {
        return Ok((dq, C64::new(0.0, 0.0)));
    }
    let (_, wpp) = weierstrass_reduced(2.0 * s.q, tau, ctx)?;
    Ok((dq, m * m * wpp / TWO_PI_I))
}

fn check_start(a: C64, t: f64, cfg: &FlowConfig, op: &'static str) -> Result<()> {
    if !(a.re > 0.0 && a.re < 0.5) {
        return Err(domain(op, format!("need 0 < Re a < 1/2, got {a}")));
    }
    let lead = (-2.0 * PI * a.re * t).exp();
    if lead > cfg.cusp_tol {
        return Err(domain(op, format!("start too close to the real axis: leading correction {lead:.2e} > {:.2e}", cfg.cusp_tol)));
    }
    Ok(())
}

/// Exponent gap g = min(2a, 1 − 2a − |m|) of the first neglected term
/// e^{2πigτ} in the cusp expansion.
pub fn cusp_gap(a: C64, m: C64) -> f64 {
    (2.0 * a.re).min(1.0 - 2.0 * a.re - m.re.abs())
}

/// Smallest T with e^{−2πgT} ≤ correction.
pub fn cusp_time(a: C64, m: C64, correction: f64) -> Result<f64> {
    let g = cusp_gap(a, m);
    if !(g > 0.0 && correction > 0.0 && correction < 1.0) {
        return Err(domain("cusp_time", format!("need a positive gap and 0 < correction < 1, got {g} and {correction}")));
    }
    Ok(-correction.ln() / (2.0 * PI * g))
}

/// Leading data at τ = iT_max: Q = aτ + η, P = 2πia, log 𝒯 = 2πia²τ.
pub fn init_cusp(p: &MonodromyPoint, cfg: &FlowConfig) -> Result<FlowState> {
    cfg.validate()?;
    check_start(p.a, cfg.t_max, cfg, "init_cusp")?;
    let tau = I * cfg.t_max;
    let eta = eta_of_nu(p)?;
    Ok(FlowState { tau, q: p.a * tau + eta, p: TWO_PI_I * p.a, log_tau: TWO_PI_I * p.a * p.a * tau })
}

/// Leading data at τ = iε: Q = ã − η̃τ, P = −2πiη̃. log 𝒯 starts at 0.
pub fn init_zero(d: &DualMonodromyPoint, cfg: &FlowConfig) -> Result<FlowState> {
    cfg.validate()?;
    let at = d.at.re.abs();
    if at == 0.0 || at >= 0.5 {
        return Err(domain("init_zero", format!("need 0 < |Re ã| < 1/2, got {}", d.at)));
    }
    let lead = (-2.0 * PI * at / cfg.eps).exp();
    if lead > cfg.cusp_tol {
        return Err(domain("init_zero", format!("start too far from the real axis: leading correction {lead:.2e}")));
    }
    let tau = I * cfg.eps;
    let etat = eta_tilde(d)?;
    Ok(FlowState { tau, q: d.at - etat * tau, p: -TWO_PI_I * etat, log_tau: C64::new(0.0, 0.0) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowRun {
    pub end: FlowState,
    pub stats: RkStats,
    /// Accepted steps, including the start, when requested.
    pub trace: Vec<FlowState>,
}

/// Integrates along the segment from `start.tau` to `target`.
pub fn integrate(start: &FlowState, target: C64, m: C64, cfg: &FlowConfig, keep_trace: bool, ctx: &PrecisionContext) -> Result<FlowRun> {
    cfg.validate()?;
    HalfPlanePoint::new(target)?;
    let lctx = cfg.ctx(ctx);
    let dt = target - start.tau;
    let t0 = start.tau;
    // errors carry the path parameter s; mapped to τ once below
    let abort = |s: f64, e: Error| match e {
        Error::Pole { .. } => Error::Integration { tau: s.into(), reason: "trajectory too close to a pole of ℘(2Q); perturb ν".into() },
        Error::Integration { reason, .. } => Error::Integration { tau: s.into(), reason },
        e => Error::Integration { tau: s.into(), reason: e.to_string() },
    };
    let f = |s: f64, y: &[C64; 3]| -> Result<[C64; 3]> {
        let tau = t0 + dt * s;
        let hp = HalfPlanePoint::new(tau).map_err(|e| abort(s, e))?;
        let (h, wpp) = hamiltonian_reduced(y[0], y[1], hp, m, &lctx).map_err(|e| abort(s, e))?;
        Ok([dt * y[1] / TWO_PI_I, dt * m * m * wpp / TWO_PI_I, dt * h / TWO_PI_I])
    };
    let mut trace = Vec::new();
    let obs = |s: f64, y: &[C64; 3]| {
        if keep_trace {
            trace.push(FlowState { tau: t0 + dt * s, q: y[0], p: y[1], log_tau: y[2] });
        }
    };
    let (y, stats) = dopri5(f, 0.0, 1.0, [start.q, start.p, start.log_tau], &cfg.rk(), obs).map_err(|e| match e {
        Error::Integration { tau, reason } => Error::Integration { tau: t0 + dt * tau.re, reason },
        e => e,
    })?;
    Ok(FlowRun { end: FlowState { tau: target, q: y[0], p: y[1], log_tau: y[2] }, stats, trace })
}

/// ∫ H dτ/2πi over a stored trajectory, by piecewise cubic interpolation of H
/// through neighbouring nodes.
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

pub fn requadrature(trace: &[FlowState], m: C64, ctx: &PrecisionContext) -> Result<C64> {
    if trace.len() < 4 {
        return Err(domain("requadrature", "need at least four trace points"));
    }
    let h: Vec<C64> =
        trace.iter().map(|s| Ok(hamiltonian_reduced(s.q, s.p, HalfPlanePoint::new(s.tau)?, m, ctx)?.0)).collect::<Result<_>>()?;
    // parametrise by arclength along the segment
    let dir = trace[trace.len() - 1].tau - trace[0].tau;
    let dir = dir / dir.norm();
    let x: Vec<f64> = trace.iter().map(|s| ((s.tau - trace[0].tau) / dir).re).collect();
    let n = x.len();
    let w = n.min(6);
    let mut total = C64::new(0.0, 0.0);
    for k in 0..n - 1 {
        let lo = (k + 1).saturating_sub(w / 2).min(n - w);
        let nodes = &x[lo..lo + w];
        let vals = &h[lo..lo + w];
        // exact integral of the local Lagrange interpolant over [x_k, x_{k+1}]
        let (a, b) = (x[k], x[k + 1]);
        for (u, wt) in GL4 {
            let t = 0.5 * (a + b) + 0.5 * (b - a) * u;
            let mut v = C64::new(0.0, 0.0);
            for i in 0..w {
                let mut l = 1.0;
                for j in 0..w {
                    if i != j {
                        l *= (t - nodes[j]) / (nodes[i] - nodes[j]);
                    }
                }
                v += vals[i] * l;
            }
            total += v * (0.5 * (b - a) * wt);
        }
    }
    Ok(total * dir / TWO_PI_I)
}

/// H̃(−Q/τ, −τP + 2πiQ, −1/τ) − (τ²H − 4πiτPQ − 4π²Q² + 2πim²τ).
pub fn ham_modular_residual(q: C64, p: C64, tau: HalfPlanePoint, m: C64, ctx: &PrecisionContext) -> Result<C64> {
    let t = tau.tau();
    let qt = -q / t;
    let pt = -t * p + TWO_PI_I * q;
    let lhs = hamiltonian(qt, pt, tau.s_dual(), m, ctx)?;
    let h = hamiltonian(q, p, tau, m, ctx)?;
    Ok(lhs - (t * t * h - 4.0 * PI * I * t * p * q - 4.0 * PI * PI * q * q + TWO_PI_I * m * m * t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularStateReport {
    pub primal: FlowState,
    pub dual: FlowState,
    /// |Q̃(i) + Q(i)/i|
    pub q_residual: f64,
    /// |P̃(i) − (−iP(i) + 2πiQ(i))|
    pub p_residual: f64,
}

/// Runs both channels from their i∞ cusps down to the fixed point τ = τ̃ = i
/// and compares them through Q̃ = −Q/τ, P̃ = −τP + 2πiQ.
pub fn modular_state_check(p: &MonodromyPoint, cfg: &FlowConfig, ctx: &PrecisionContext) -> Result<ModularStateReport> {
    let (d, _) = dual_from_primal(p)?;
    let primal = integrate(&init_cusp(p, cfg)?, I, p.m, cfg, false, ctx)?.end;
    let dp = MonodromyPoint::new(d.at, d.nut, d.m);
    let dual = integrate(&init_cusp(&dp, cfg)?, I, p.m, cfg, false, ctx)?.end;
    Ok(ModularStateReport {
        primal,
        dual,
        q_residual: (dual.q + primal.q / I).norm(),
        p_residual: (dual.p - (-I * primal.p + TWO_PI_I * primal.q)).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionReport {
    pub numeric: C64,
    pub closed_form: C64,
    pub residual: f64,
    /// δν̃ = delta_nu(ã, m), the reading adopted for the unnamed shift.
    pub delta_nut: C64,
    pub end: FlowState,
    pub stats: RkStats,
}

/// Integrates from iT_max down to iε and forms
/// e^{iã(ν̃+δν̃)} (iε)^{m²} 𝒯(iε) e^{−2πiη̃²·iε} / [e^{−2πia²τ}𝒯]_{iT_max},
/// compared with e^{iπm²}Υ_S.
pub fn connection_ratio(p: &MonodromyPoint, cfg: &FlowConfig, ctx: &PrecisionContext) -> Result<ConnectionReport> {
    let (d, _) = dual_from_primal(p)?;
    let start = init_cusp(p, cfg)?;
    let target = I * cfg.eps;
    let run = integrate(&start, target, p.m, cfg, false, ctx)?;
    let m2 = p.m * p.m;
    let dnt = delta_nu(d.at, d.m)?;
    let etat = (d.nut + dnt) / (4.0 * PI);
    let norm = start.log_tau - TWO_PI_I * p.a * p.a * start.tau;
    let log_num = I * d.at * (d.nut + dnt) + m2 * target.ln() + run.end.log_tau - norm - TWO_PI_I * etat * etat * target;
    let numeric = log_num.exp();
    let closed_form = (I * PI * m2).exp() * upsilon_full(p, ctx)?;
    Ok(ConnectionReport {
        numeric,
        closed_form,
        residual: (numeric / closed_form - 1.0).norm(),
        delta_nut: dnt,
        end: run.end,
        stats: run.stats,
    })
}
