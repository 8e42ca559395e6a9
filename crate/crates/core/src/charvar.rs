//! Monodromy data of the once-punctured torus: the matrices M_A, M_B, M_0,
//! trace coordinates, the Fricke cubic, and the coordinate maps between the
//! A-cycle chart (a, ν, m) and the B-cycle chart (ã, ν̃, m).

use crate::context::PrecisionContext;
use crate::error::{degenerate, Error, Result};
use crate::mat2::Mat2;
use crate::numerics::gamma::ln_gamma;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const I: C64 = C64::new(0.0, 1.0);
const DEGENERATE_SIN: f64 = 1e-12;
/// Trace mismatch above which the principal dual branch is rejected.
pub const BRANCH_RESIDUAL: f64 = 1e-8;

/// A-cycle coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyPoint {
    pub a: C64,
    pub nu: C64,
    pub m: C64,
}

impl MonodromyPoint {
    pub fn new(a: C64, nu: C64, m: C64) -> Self {
        Self { a, nu, m }
    }

    pub fn real(a: f64, nu: f64, m: f64) -> Self {
        Self::new(a.into(), nu.into(), m.into())
    }

    /// True when Re a ∈ [0,1), Re ν ∈ [0,4π), Re m ∈ [0,1).
    pub fn in_fundamental_cell(&self) -> bool {
        (0.0..1.0).contains(&self.a.re) && (0.0..4.0 * PI).contains(&self.nu.re) && (0.0..1.0).contains(&self.m.re)
    }
}

/// B-cycle coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualMonodromyPoint {
    pub at: C64,
    pub nut: C64,
    pub m: C64,
}

impl DualMonodromyPoint {
    pub fn new(at: C64, nut: C64, m: C64) -> Self {
        Self { at, nut, m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyRep {
    pub ma: Mat2,
    pub mb: Mat2,
    pub m0: Mat2,
}

impl MonodromyRep {
    /// ‖M_B⁻¹M_A⁻¹M_BM_AM_0 − 𝟙‖.
    pub fn constraint_residual(&self) -> f64 {
        match (self.mb.inv(), self.ma.inv()) {
            (Some(bi), Some(ai)) => (bi * ai * self.mb * self.ma * self.m0 - Mat2::identity()).norm_max(),
            _ => f64::INFINITY,
        }
    }

    pub fn traces(&self) -> TraceCoords {
        TraceCoords { a: self.ma.trace(), b: self.mb.trace(), c: (self.ma * self.mb).trace() }
    }
}

/// tr M_A, tr M_B, tr M_AM_B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceCoords {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl TraceCoords {
    pub fn distance(&self, o: &TraceCoords) -> f64 {
        (self.a - o.a).norm().max((self.b - o.b).norm()).max((self.c - o.c).norm())
    }

    /// Traces of the S-transformed representation read in the primal chart.
    pub fn s_transform(&self) -> TraceCoords {
        TraceCoords { a: self.b, b: self.a, c: self.a * self.b - self.c }
    }
}

fn sin_2pi(x: C64, op: &'static str) -> Result<C64> {
    let s = (2.0 * PI * x).sin();
    if s.norm() < DEGENERATE_SIN {
        return Err(degenerate(op, format!("sin 2πa vanishes at a = {x}")));
    }
    Ok(s)
}

/// s± = sin π(2x ± m)/sin 2πx.
fn s_pm(x: C64, m: C64, op: &'static str) -> Result<(C64, C64)> {
    let s = sin_2pi(x, op)?;
    Ok(((PI * (2.0 * x - m)).sin() / s, (PI * (2.0 * x + m)).sin() / s))
}

pub fn build_monodromy(p: &MonodromyPoint) -> Result<MonodromyRep> {
    const OP: &str = "build_monodromy";
    let (a, nu, m) = (p.a, p.nu, p.m);
    let s = sin_2pi(a, OP)?;
    let ma = Mat2::diag((2.0 * PI * I * a).exp(), (-2.0 * PI * I * a).exp());
    let em = (-I * nu / 2.0).exp();
    let ep = (I * nu / 2.0).exp();
    let spm = (PI * m).sin();
    let mb = Mat2::new(em * (PI * (2.0 * a - m)).sin(), ep * spm, -em * spm, ep * (PI * (2.0 * a + m)).sin()).scale(1.0 / s);
    let (bi, ai) = (mb.inv(), ma.inv());
    let (Some(bi), Some(ai)) = (bi, ai) else {
        return Err(degenerate(OP, "singular monodromy"));
    };
    let m0 = (bi * ai * mb * ma).inv().ok_or_else(|| degenerate(OP, "singular commutator"))?;
    Ok(MonodromyRep { ma, mb, m0 })
}

pub fn trace_coords(p: &MonodromyPoint) -> Result<TraceCoords> {
    let (sm, sp) = s_pm(p.a, p.m, "trace_coords")?;
    let em = (-I * p.nu / 2.0).exp();
    let ep = (I * p.nu / 2.0).exp();
    let e2 = (2.0 * PI * I * p.a).exp();
    Ok(TraceCoords { a: 2.0 * (2.0 * PI * p.a).cos(), b: em * sm + ep * sp, c: em * e2 * sm + ep / e2 * sp })
}

/// Traces expressed through the B-cycle chart.
pub fn dual_trace_coords(d: &DualMonodromyPoint) -> Result<TraceCoords> {
    let (sm, sp) = s_pm(d.at, d.m, "dual_trace_coords")?;
    let em = (-I * d.nut / 2.0).exp();
    let ep = (I * d.nut / 2.0).exp();
    let e2 = (2.0 * PI * I * d.at).exp();
    Ok(TraceCoords { a: em * sm + ep * sp, b: 2.0 * (2.0 * PI * d.at).cos(), c: em / e2 * sm + ep * e2 * sp })
}

/// A² + B² + C² − ABC − 2cos 2πm − 2.
pub fn fricke_residual(t: &TraceCoords, m: C64) -> C64 {
    t.a * t.a + t.b * t.b + t.c * t.c - t.a * t.b * t.c - 2.0 * (2.0 * PI * m).cos() - 2.0
}

/// a from (ã, ν) through e^{4πia} as a ratio of exponentials; defined mod ½.
pub fn a_from_dual(d: &DualMonodromyPoint, nu: C64) -> Result<C64> {
    let c = 2.0 * (2.0 * PI * d.at).cos();
    let e = |s: f64, t: f64| (s * PI * I * d.m + t * I * nu / 2.0).exp();
    let num = c - e(1.0, -1.0) - e(-1.0, 1.0);
    let den = c - e(1.0, 1.0) - e(-1.0, -1.0);
    if den.norm() < DEGENERATE_SIN {
        return Err(degenerate("a_from_dual", "vanishing denominator"));
    }
    Ok((num / den).ln() / (4.0 * PI * I))
}

/// Which sign of ã the dual map settled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualBranch {
    Principal,
    Reflected,
}

/// ν̃ from the trace combination tr M_A − e^{2πiã} tr M_AM_B.
pub fn nut_from_traces(t: &TraceCoords, at: C64, m: C64) -> Result<C64> {
    const OP: &str = "dual_from_primal";
    let e = (2.0 * PI * I * at).exp();
    let den = (1.0 - e * e) * (PI * (2.0 * at + m)).sin();
    if den.norm() < DEGENERATE_SIN {
        return Err(degenerate(OP, "sin π(2ã+m)(1 − e^{4πiã}) vanishes"));
    }
    let w = (t.a - e * t.c) * sin_2pi(at, OP)? / den;
    Ok(-2.0 * I * w.ln())
}

/// ν from the combination tr M_B − e^{−2πia} tr M_AM_B.
pub fn nu_from_traces(t: &TraceCoords, a: C64, m: C64) -> Result<C64> {
    const OP: &str = "nu_from_dual";
    let e = (-2.0 * PI * I * a).exp();
    let den = (1.0 - e * e) * (PI * (2.0 * a + m)).sin();
    if den.norm() < DEGENERATE_SIN {
        return Err(degenerate(OP, "sin π(2a+m)(1 − e^{−4πia}) vanishes"));
    }
    let w = (t.b - e * t.c) * sin_2pi(a, OP)? / den;
    Ok(-2.0 * I * w.ln())
}

fn parabolic_check(x: C64, op: &'static str) -> Result<()> {
    if (x - 2.0).norm() < 1e-12 || (x + 2.0).norm() < 1e-12 {
        return Err(Error::Degenerate { op, detail: format!("parabolic trace {x}") });
    }
    Ok(())
}

/// S-duality map (a, ν, m) ↦ (ã, ν̃, m): ã = arccos(B/2)/2π on the principal
/// branch, ν̃ from the trace combination; ã ↦ −ã only if the principal choice
/// fails to reproduce the traces.
pub fn dual_from_primal(p: &MonodromyPoint) -> Result<(DualMonodromyPoint, DualBranch)> {
    const OP: &str = "dual_from_primal";
    let t = trace_coords(p)?;
    parabolic_check(t.b, OP)?;
    let at0 = (t.b / 2.0).acos() / (2.0 * PI);
    let try_branch = |at: C64| -> Result<(DualMonodromyPoint, f64)> {
        let d = DualMonodromyPoint::new(at, nut_from_traces(&t, at, p.m)?, p.m);
        let r = dual_trace_coords(&d)?.distance(&t);
        Ok((d, r))
    };
    let principal = try_branch(at0);
    if let Ok((d, r)) = principal {
        if r <= BRANCH_RESIDUAL * (1.0 + t.c.norm()) {
            return Ok((d, DualBranch::Principal));
        }
    }
    let (d, r) = try_branch(-at0)?;
    if r <= BRANCH_RESIDUAL * (1.0 + t.c.norm()) {
        return Ok((d, DualBranch::Reflected));
    }
    Err(degenerate(OP, format!("no branch reproduces tr M_AM_B (residual {r:.3e})")))
}

/// Inverse map (ã, ν̃, m) ↦ (a, ν).
pub fn nu_from_dual(d: &DualMonodromyPoint) -> Result<(C64, C64)> {
    const OP: &str = "nu_from_dual";
    let t = dual_trace_coords(d)?;
    parabolic_check(t.a, OP)?;
    let a0 = (t.a / 2.0).acos() / (2.0 * PI);
    for a in [a0, -a0] {
        if let Ok(nu) = nu_from_traces(&t, a, d.m) {
            let p = MonodromyPoint::new(a, nu, d.m);
            if trace_coords(&p)?.distance(&t) <= BRANCH_RESIDUAL * (1.0 + t.c.norm()) {
                return Ok((a, nu));
            }
        }
    }
    Err(degenerate(OP, "no branch reproduces tr M_AM_B"))
}

/// Residuals of the two relations expressing (ã, ν) through (a, ν̃), in
/// exponentiated form so they do not depend on log branches.
pub fn nueqamnut_residuals(a: C64, nu: C64, at: C64, nut: C64, m: C64) -> (C64, C64) {
    let s = |x: C64| (PI * x).sin();
    let r1 = (4.0 * PI * I * at).exp()
        - s(a - m / 2.0 + nut / (4.0 * PI)) * s(a + m / 2.0 - nut / (4.0 * PI))
            / (s(a - m / 2.0 - nut / (4.0 * PI)) * s(a + m / 2.0 + nut / (4.0 * PI)));
    let r2 = (I * nu / 2.0).exp() - (2.0 * PI * I * at).exp() * s(a - m / 2.0 - nut / (4.0 * PI)) / s(a + m / 2.0 - nut / (4.0 * PI));
    (r1, r2)
}

/// Same relations with the roles of the charts exchanged.
pub fn nut_as_aatnu_residuals(a: C64, nu: C64, at: C64, nut: C64, m: C64) -> (C64, C64) {
    nueqamnut_residuals(at, nut, a, nu, m)
}

/// ln[Γ(2a)Γ(1−2a−m)/(Γ(1−2a)Γ(2a−m))].
fn ln_eta_ratio(a: C64, m: C64) -> Result<C64> {
    let args = [2.0 * a, 1.0 - 2.0 * a - m, 1.0 - 2.0 * a, 2.0 * a - m];
    for z in args {
        if crate::numerics::gamma::is_nonpositive_integer(z) {
            return Err(Error::Pole { op: "eta_of_nu", at: z });
        }
    }
    let l = ln_gamma(args[0]) + ln_gamma(args[1]) - ln_gamma(args[2]) - ln_gamma(args[3]);
    // principal branch of the log of the ratio
    Ok(l.exp().ln())
}

/// η = ν/4π + (i/2π)·ln[Γ(2a)Γ(1−2a−m)/(Γ(1−2a)Γ(2a−m))].
pub fn eta_of_nu(p: &MonodromyPoint) -> Result<C64> {
    Ok(p.nu / (4.0 * PI) + I / (2.0 * PI) * ln_eta_ratio(p.a, p.m)?)
}

/// η̃ with the same expression in (ã, ν̃).
pub fn eta_tilde(d: &DualMonodromyPoint) -> Result<C64> {
    eta_of_nu(&MonodromyPoint::new(d.at, d.nut, d.m))
}

/// δν := 4πη − ν.
pub fn delta_nu(a: C64, m: C64) -> Result<C64> {
    Ok(2.0 * I * ln_eta_ratio(a, m)?)
}

/// {A,B} − (C − AB/2) with {f,g} = (1/2π)(∂_a f ∂_ν g − ∂_ν f ∂_a g),
/// derivatives by central differences of step ctx.fd_step.
pub fn goldman_residual(p: &MonodromyPoint, ctx: &PrecisionContext) -> Result<C64> {
    let h = ctx.fd_step;
    let tr = |da: f64, dn: f64| trace_coords(&MonodromyPoint::new(p.a + da, p.nu + dn, p.m));
    let (ap, am) = (tr(h, 0.0)?, tr(-h, 0.0)?);
    let (np, nm) = (tr(0.0, h)?, tr(0.0, -h)?);
    let da_a = (ap.a - am.a) / (2.0 * h);
    let da_b = (ap.b - am.b) / (2.0 * h);
    let dn_a = (np.a - nm.a) / (2.0 * h);
    let dn_b = (np.b - nm.b) / (2.0 * h);
    let bracket = (da_a * dn_b - dn_a * da_b) / (2.0 * PI);
    let t = trace_coords(p)?;
    Ok(bracket - (t.c - 0.5 * t.a * t.b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// m ↦ −m with the compensating shift of ν.
    MFlip,
    /// (a, ν) ↦ (−a, −ν).
    SignFlip,
    /// a ↦ a + k_a, ν ↦ ν + 4πk_ν, m ↦ m + k_m.
    Shift { k_a: i64, k_nu: i64, k_m: i64 },
}

pub fn apply_symmetry(p: &MonodromyPoint, kind: Symmetry) -> Result<MonodromyPoint> {
    match kind {
        Symmetry::MFlip => {
            let r = (PI * (2.0 * p.a + p.m)).sin() / (PI * (2.0 * p.a - p.m)).sin();
            if !r.is_finite() || r.norm() == 0.0 {
                return Err(Error::Cut { op: "apply_symmetry", at: r });
            }
            Ok(MonodromyPoint::new(p.a, p.nu - 2.0 * I * r.ln(), -p.m))
        }
        Symmetry::SignFlip => Ok(MonodromyPoint::new(-p.a, -p.nu, p.m)),
        Symmetry::Shift { k_a, k_nu, k_m } => Ok(MonodromyPoint::new(p.a + k_a as f64, p.nu + 4.0 * PI * k_nu as f64, p.m + k_m as f64)),
    }
}

/// Analytic Jacobian of (ã, ν̃) with respect to (a, ν, m).
#[derive(Debug, Clone, Copy)]
pub struct DualJacobian {
    pub dat: [C64; 3],
    pub dnut: [C64; 3],
}

/// Partial derivatives of (B, tr-A-in-dual-chart) obtained by implicit
/// differentiation of the trace equalities.
pub fn dual_jacobian(p: &MonodromyPoint, d: &DualMonodromyPoint) -> Result<DualJacobian> {
    const OP: &str = "dual_jacobian";
    let (a, nu, m) = (p.a, p.nu, p.m);
    let s = sin_2pi(a, OP)?;
    let c2 = (2.0 * PI * a).cos();
    let em = (-I * nu / 2.0).exp();
    let ep = (I * nu / 2.0).exp();
    let sm = (PI * (2.0 * a - m)).sin();
    let sp = (PI * (2.0 * a + m)).sin();
    let cm = (PI * (2.0 * a - m)).cos();
    let cp = (PI * (2.0 * a + m)).cos();
    // B = (em·sm + ep·sp)/s
    let b_num = em * sm + ep * sp;
    let db_da = (em * cm * 2.0 * PI + ep * cp * 2.0 * PI) / s - b_num * 2.0 * PI * c2 / (s * s);
    let db_dnu = (-I / 2.0 * em * sm + I / 2.0 * ep * sp) / s;
    let db_dm = (-PI * em * cm + PI * ep * cp) / s;
    // B = 2cos 2πã
    let st = sin_2pi(d.at, OP)?;
    let k = -1.0 / (4.0 * PI * st);
    let dat = [db_da * k, db_dnu * k, db_dm * k];
    // A(a) = 2cos 2πa = (ẽm·s̃m + ẽp·s̃p)/s̃ =: F(ã, ν̃, m)
    let (at, nut) = (d.at, d.nut);
    let tem = (-I * nut / 2.0).exp();
    let tep = (I * nut / 2.0).exp();
    let tsm = (PI * (2.0 * at - m)).sin();
    let tsp = (PI * (2.0 * at + m)).sin();
    let tcm = (PI * (2.0 * at - m)).cos();
    let tcp = (PI * (2.0 * at + m)).cos();
    let tc2 = (2.0 * PI * at).cos();
    let f_num = tem * tsm + tep * tsp;
    let df_dat = (tem * tcm + tep * tcp) * 2.0 * PI / st - f_num * 2.0 * PI * tc2 / (st * st);
    let df_dnut = (-I / 2.0 * tem * tsm + I / 2.0 * tep * tsp) / st;
    let df_dm = (-PI * tem * tcm + PI * tep * tcp) / st;
    if df_dnut.norm() < DEGENERATE_SIN {
        return Err(degenerate(OP, "∂A/∂ν̃ vanishes"));
    }
    let da = [-4.0 * PI * s, C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let dm = [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
    let mut dnut = [C64::new(0.0, 0.0); 3];
    for k in 0..3 {
        dnut[k] = (da[k] - df_dat * dat[k] - df_dm * dm[k]) / df_dnut;
    }
    Ok(DualJacobian { dat, dnut })
}
