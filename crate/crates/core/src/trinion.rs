//! Three-punctured sphere problems obtained by cutting the torus along the A-
//! or B-cycle: the hypergeometric Lax matrix and solution, the frames that
//! diagonalise its residues, and the one-forms ω₃pt built from them.

use crate::charvar::{dual_from_primal, dual_jacobian, DualJacobian, DualMonodromyPoint, MonodromyPoint, MonodromyRep};
use crate::context::PrecisionContext;
use crate::error::{degenerate, Error, Result};
use crate::mat2::Mat2;
use crate::numerics::barnes::{dln_barnes_g1p, dln_ghat};
use crate::numerics::gamma::{digamma, is_nonpositive_integer, ln_gamma, pi_cot_pi, LN_2PI};
use crate::numerics::hyp2f1::hyp2f1;
use crate::specfun::HalfPlanePoint;
use num_complex::Complex64 as C64;
use std::f64::consts::{LN_2, PI};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const SINGULAR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Which determination of arg(−1) enters log(−e^{−2πiz}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchConvention {
    /// log(−x) = log x − iπ; matches the principal continuation of ₂F₁.
    #[default]
    MinusIPi,
    /// log(−x) = log x + iπ.
    PlusIPi,
}

impl BranchConvention {
    fn sign(self) -> f64 {
        match self {
            BranchConvention::MinusIPi => -1.0,
            BranchConvention::PlusIPi => 1.0,
        }
    }
}

/// Free phases of the frames. `delta_shift` moves Δ₀ and Δ̃₀ together.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameOverrides {
    pub delta_minus: C64,
    pub delta_plus: C64,
    pub delta_shift: C64,
    pub branch: BranchConvention,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrinionFrame {
    pub side: Side,
    pub g_minus: Mat2,
    pub g_zero: Mat2,
    pub g_plus: Mat2,
    /// (δ₋, δ₀, δ₊)
    pub deltas: [C64; 3],
    /// X₀ (side A) or X_∞ (side B), fixed by C₀ = 𝟙.
    pub x_norm: Mat2,
    pub branch: BranchConvention,
    /// Exponent of the side: a or ã.
    pub exponent: C64,
    pub m: C64,
}

/// Coordinates in which a one-form is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// (a, ν, m)
    ANuM,
    /// (ã, ν, m)
    ATildeNuM,
    /// (a, ν̃, m)
    ANuTildeM,
}

impl Chart {
    pub fn names(self) -> [&'static str; 3] {
        match self {
            Chart::ANuM => ["a", "nu", "m"],
            Chart::ATildeNuM => ["at", "nu", "m"],
            Chart::ANuTildeM => ["a", "nut", "m"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneForm {
    pub chart: Chart,
    pub c: [C64; 3],
}

impl OneForm {
    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn sub(&self, o: &OneForm) -> Result<OneForm> {
        if self.chart != o.chart {
            return Err(degenerate("OneForm::sub", "chart mismatch"));
        }
        Ok(OneForm { chart: self.chart, c: [0, 1, 2].map(|k| self.c[k] - o.c[k]) })
    }

    /// Re-expand in another chart at the point `p`.
    pub fn to_chart(&self, target: Chart, p: &MonodromyPoint) -> Result<OneForm> {
        if target == self.chart {
            return Ok(*self);
        }
        let (d, _) = dual_from_primal(p)?;
        let jac = dual_jacobian(p, &d)?;
        // ω_native = Jᵀ ω_chart
        let js = chart_rows(self.chart, &jac);
        let native: [C64; 3] = [0, 1, 2].map(|k| (0..3).map(|r| js[r][k] * self.c[r]).sum());
        let jt = chart_rows(target, &jac);
        let jtt = [0, 1, 2].map(|r| [0, 1, 2].map(|k| jt[k][r]));
        Ok(OneForm { chart: target, c: solve3(jtt, native)? })
    }
}

fn chart_rows(chart: Chart, j: &DualJacobian) -> [[C64; 3]; 3] {
    let e = |k: usize| {
        let mut r = [ZERO; 3];
        r[k] = ONE;
        r
    };
    match chart {
        Chart::ANuM => [e(0), e(1), e(2)],
        Chart::ATildeNuM => [j.dat, e(1), e(2)],
        Chart::ANuTildeM => [e(0), j.dnut, e(2)],
    }
}

fn solve3(m: [[C64; 3]; 3], b: [C64; 3]) -> Result<[C64; 3]> {
    let det = |m: &[[C64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d.norm() < SINGULAR {
        return Err(degenerate("OneForm::to_chart", "chart is singular at this point"));
    }
    let mut out = [ZERO; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = b[r];
        }
        *o = det(&mk) / d;
    }
    Ok(out)
}

fn lgamma(z: C64, op: &'static str) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { op, at: z });
    }
    Ok(ln_gamma(z))
}

fn psi(z: C64, op: &'static str) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { op, at: z });
    }
    Ok(digamma(z))
}

/// L^A(z; a, m) = 2πi [[a, −m/(e^{2πiz}−1)], [−m e^{2πiz}/(e^{2πiz}−1), −a]].
fn lax_a(z: C64, a: C64, m: C64) -> Result<Mat2> {
    let e = (2.0 * PI * I * z).exp();
    if (e - 1.0).norm() < SINGULAR {
        return Err(Error::Pole { op: "lax_3pt", at: z });
    }
    let k = 2.0 * PI * I;
    Ok(Mat2::new(a, -m / (e - 1.0), -m * e / (e - 1.0), -a).scale(k))
}

/// Data of the three-point Lax matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaxData {
    A { a: C64, m: C64 },
    B { at: C64, m: C64, tau: HalfPlanePoint },
}

/// Side B is the side-A matrix in the variable −z/τ with exponent ã:
/// L^B(z) = −τ⁻¹ L^A(−z/τ; ã, m).
pub fn lax_3pt(z: C64, data: LaxData) -> Result<Mat2> {
    match data {
        LaxData::A { a, m } => lax_a(z, a, m),
        LaxData::B { at, m, tau } => {
            let t = tau.tau();
            Ok(lax_a(-z / t, at, m)?.scale(-1.0 / t))
        }
    }
}

/// Γ(1−2x)Γ(2x−m)/(Γ(2x)Γ(1−2x−m)).
fn ln_r(x: C64, m: C64, op: &'static str) -> Result<C64> {
    Ok(lgamma(1.0 - 2.0 * x, op)? + lgamma(2.0 * x - m, op)? - lgamma(2.0 * x, op)? - lgamma(1.0 - 2.0 * x - m, op)?)
}

/// X_A = 2^{−4m}Γ(2a+m)Γ(½−m)/(Γ(2a−m)Γ(½+m)).
fn ln_xa(a: C64, m: C64, op: &'static str) -> Result<C64> {
    Ok(-4.0 * m * LN_2 + lgamma(2.0 * a + m, op)? + lgamma(0.5 - m, op)? - lgamma(2.0 * a - m, op)? - lgamma(0.5 + m, op)?)
}

/// X_B = 2^{−4m}Γ(1−2ã+m)Γ(½−m)/(Γ(1−2ã−m)Γ(½+m)).
fn ln_xb(at: C64, m: C64, op: &'static str) -> Result<C64> {
    Ok(-4.0 * m * LN_2 + lgamma(1.0 - 2.0 * at + m, op)? + lgamma(0.5 - m, op)? - lgamma(1.0 - 2.0 * at - m, op)? - lgamma(0.5 + m, op)?)
}

/// Z = −i e^{−πim+iν/2} sin π(2ã−m)/(cos πm − e^{iν/2} cos 2πã).
fn z_arg(at: C64, nu: C64, m: C64, op: &'static str) -> Result<C64> {
    let den = (PI * m).cos() - (I * nu / 2.0).exp() * (2.0 * PI * at).cos();
    if den.norm() < SINGULAR {
        return Err(degenerate(op, "cos πm = e^{iν/2} cos 2πã"));
    }
    Ok(-I * (-PI * I * m + I * nu / 2.0).exp() * (PI * (2.0 * at - m)).sin() / den)
}

/// Δ₀ − Δ̃₀ = (i/2) log Z.
pub fn diff_delta0(at: C64, nu: C64, m: C64) -> Result<C64> {
    Ok(I / 2.0 * z_arg(at, nu, m, "frames")?.ln())
}

fn unimodular_phase(d: C64) -> Mat2 {
    Mat2::diag((I * d).exp(), (-I * d).exp())
}

fn g_zero(d0: C64) -> Mat2 {
    unimodular_phase(d0) * Mat2::from_real(1.0, -1.0, 1.0, 1.0)
}

fn g_minus(dm: C64, x: C64, m: C64) -> Mat2 {
    unimodular_phase(dm) * Mat2::new(ONE, ZERO, m / (2.0 * x), ONE)
}

fn g_plus(dp: C64, x: C64, nu: C64, m: C64, op: &'static str) -> Result<Mat2> {
    let r = ln_r(x, m, op)?;
    Ok(unimodular_phase(dp) * Mat2::diag((I * nu / 2.0 + r).exp(), (-I * nu / 2.0 - r).exp()) * Mat2::new(ONE, m / (2.0 * x), ZERO, ONE))
}

/// Γ(2m)/Γ(m) written so that m → 0 stays finite.
fn gamma_2m_over_m(m: C64, op: &'static str) -> Result<C64> {
    Ok(0.5 * (lgamma(1.0 + 2.0 * m, op)? - lgamma(1.0 + m, op)?).exp())
}

/// Limit of Y·(2πiz)^{−mσ₃}·G₀⁻¹ at z → 0 for the un-normalised solution
/// (side A, exponent x), without the δ₀ phase.
fn c0_core(x: C64, m: C64, op: &'static str) -> Result<Mat2> {
    let gp = gamma_2m_over_m(m, op)?;
    let gm = gamma_2m_over_m(-m, op)?;
    let e = (PI * I * x).exp();
    let l = |s: C64| -> Result<C64> { lgamma(s, op) };
    let c11 = e * (l(1.0 - 2.0 * x)? - l(1.0 - 2.0 * x - m)?).exp() * gm;
    let c12 = -e * (l(1.0 - 2.0 * x)? - l(1.0 - 2.0 * x + m)?).exp() * gp;
    let c21 = -(l(2.0 * x)? - l(2.0 * x - m)?).exp() * gm / e;
    let c22 = -(l(2.0 * x)? - l(2.0 * x + m)?).exp() * gp / e;
    Ok(Mat2::new(c11, c12, c21, c22))
}

/// Frames of the three-point problem on the given side, with the canonical
/// δ₀ = Δ₀ − (i/2) log X_A, Δ₀ = (i/2) log Z on side A and
/// δ̃₀ = Δ̃₀ − (i/2) log X_B, Δ̃₀ = 0 on side B.
pub fn frames(side: Side, p: &MonodromyPoint, ov: &FrameOverrides) -> Result<TrinionFrame> {
    let (d, _) = dual_from_primal(p)?;
    frames_with_dual(side, p, &d, ov)
}

pub fn frames_with_dual(side: Side, p: &MonodromyPoint, d: &DualMonodromyPoint, ov: &FrameOverrides) -> Result<TrinionFrame> {
    const OP: &str = "frames";
    let m = p.m;
    let (x, nu, d0) = match side {
        Side::A => {
            let d0 = diff_delta0(d.at, p.nu, m)? + ov.delta_shift - I / 2.0 * ln_xa(p.a, m, OP)?;
            (p.a, p.nu, d0)
        }
        Side::B => (d.at, d.nut, ov.delta_shift - I / 2.0 * ln_xb(d.at, m, OP)?),
    };
    if (2.0 * x).norm() < SINGULAR {
        return Err(degenerate(OP, "exponent vanishes"));
    }
    let core = c0_core(x, m, OP)? * Mat2::sigma3() * unimodular_phase(-d0);
    let x_norm = core.inv().ok_or_else(|| degenerate(OP, "singular C₀ normalisation"))?;
    Ok(TrinionFrame {
        side,
        g_minus: g_minus(ov.delta_minus, x, m),
        g_zero: g_zero(d0),
        g_plus: g_plus(ov.delta_plus, x, nu, m, OP)?,
        deltas: [ov.delta_minus, d0, ov.delta_plus],
        x_norm,
        branch: ov.branch,
        exponent: x,
        m,
    })
}

/// Hypergeometric fundamental matrix of ∂_z Y = Y L^A(z) on side A:
/// Y = X₀ (1−x)^m diag((−x)^{−a}, (−x)^{a}) F(x), x = e^{−2πiz}.
pub fn y3pt_a(z: C64, p: &MonodromyPoint, frame: &TrinionFrame, ctx: &PrecisionContext) -> Result<Mat2> {
    const OP: &str = "y3pt_A";
    if frame.side != Side::A {
        return Err(degenerate(OP, "frame belongs to side B"));
    }
    let (a, m) = (p.a, p.m);
    for r in [2.0 * a, 2.0 * a - m, 2.0 * a + m] {
        if r.im == 0.0 && r.re == r.re.round() {
            return Err(degenerate(OP, format!("resonant exponent {r}")));
        }
    }
    let x = (-2.0 * PI * I * z).exp();
    if (1.0 - x).norm() < SINGULAR {
        return Err(Error::Pole { op: OP, at: z });
    }
    let lx = -2.0 * PI * I * z + frame.branch.sign() * PI * I;
    let pre = (m * (1.0 - x).ln()).exp();
    let dm = Mat2::diag((-a * lx).exp() * pre, (a * lx).exp() * pre);
    let f = |aa: C64, bb: C64, cc: C64| hyp2f1(aa, bb, cc, x, ctx);
    let fm = Mat2::new(
        f(m, 1.0 + m - 2.0 * a, 1.0 - 2.0 * a)?,
        -m * x / (2.0 * a - 1.0) * f(1.0 + m, 1.0 + m - 2.0 * a, 2.0 - 2.0 * a)?,
        m / (2.0 * a) * f(1.0 + m, m + 2.0 * a, 1.0 + 2.0 * a)?,
        f(m, m + 2.0 * a, 2.0 * a)?,
    );
    Ok(frame.x_norm * dm * fm)
}

/// [[s₋, −Γ(1−2x)²Γ(2x−m) sin πm/(πΓ(1−2x−m))], [Γ(2x)²Γ(1−2x−m) sin πm/(πΓ(2x−m)), s₊]]
/// · diag(e^{−iν/2}, e^{iν/2}).
fn transport(x: C64, nu: C64, m: C64, op: &'static str) -> Result<Mat2> {
    let s = (2.0 * PI * x).sin();
    if s.norm() < SINGULAR {
        return Err(degenerate(op, "sin 2πx vanishes"));
    }
    let sm = (PI * m).sin() / PI;
    let u = (2.0 * lgamma(1.0 - 2.0 * x, op)? + lgamma(2.0 * x - m, op)? - lgamma(1.0 - 2.0 * x - m, op)?).exp();
    let l = (2.0 * lgamma(2.0 * x, op)? + lgamma(1.0 - 2.0 * x - m, op)? - lgamma(2.0 * x - m, op)?).exp();
    let n = Mat2::new((PI * (2.0 * x - m)).sin() / s, -u * sm, l * sm, (PI * (2.0 * x + m)).sin() / s);
    Ok(n * Mat2::diag((-I * nu / 2.0).exp(), (I * nu / 2.0).exp()))
}

/// M_A and M_B in the normalisation of the frame; M_0 closes the relation
/// M_0 M_B⁻¹ M_A⁻¹ M_B M_A = 𝟙.
pub fn monodromy_from_frames(frame: &TrinionFrame, p: &MonodromyPoint) -> Result<MonodromyRep> {
    const OP: &str = "monodromy_from_frames";
    let xn = frame.x_norm;
    let xi = xn.inv().ok_or_else(|| degenerate(OP, "singular X_norm"))?;
    let m = p.m;
    let (ma, mb) = match frame.side {
        Side::A => {
            let a = p.a;
            let ea = Mat2::diag((2.0 * PI * I * a).exp(), (-2.0 * PI * I * a).exp());
            (xn * ea * xi, xn * transport(a, p.nu, m, OP)? * xi)
        }
        Side::B => {
            let (d, _) = dual_from_primal(p)?;
            let eb = Mat2::diag((-2.0 * PI * I * d.at).exp(), (2.0 * PI * I * d.at).exp());
            (xn * transport(d.at, d.nut, m, OP)? * xi, xn * eb * xi)
        }
    };
    let c = (mb.inv().unwrap() * ma.inv().unwrap() * mb * ma).inv().ok_or_else(|| degenerate(OP, "singular commutator"))?;
    Ok(MonodromyRep { ma, mb, m0: c })
}

/// ∂_x ln R(x,m), ∂_m ln R(x,m).
fn dln_r(x: C64, m: C64, op: &'static str) -> Result<(C64, C64)> {
    let dx = 2.0 * (-psi(1.0 - 2.0 * x, op)? + psi(2.0 * x - m, op)? - psi(2.0 * x, op)? + psi(1.0 - 2.0 * x - m, op)?);
    let dm = -psi(2.0 * x - m, op)? + psi(1.0 - 2.0 * x - m, op)?;
    Ok((dx, dm))
}

/// ∂ln Z/∂(ã, ν, m).
fn dln_z(at: C64, nu: C64, m: C64) -> [C64; 3] {
    let e = (I * nu / 2.0).exp();
    let den = (PI * m).cos() - e * (2.0 * PI * at).cos();
    let ct = pi_cot_pi(2.0 * at - m);
    [
        2.0 * ct - 2.0 * PI * e * (2.0 * PI * at).sin() / den,
        I / 2.0 + I / 2.0 * e * (2.0 * PI * at).cos() / den,
        -PI * I - ct + PI * (PI * m).sin() / den,
    ]
}

fn lift(jac: &DualJacobian, d_at: C64, d_nut: C64) -> [C64; 3] {
    [0, 1, 2].map(|k| d_at * jac.dat[k] + d_nut * jac.dnut[k])
}

/// Closed form of ω₃pt on the given side in chart (a, ν, m), sign fixed so
/// that d log Υ_S = −ω^A + ω^B:
/// ω^A = a(i dν + 2 d ln R(a,m)) + m(−d ln Z + d ln X_A),
/// ω^B = ã(i dν̃ + 2 d ln R(ã,m)) + m d ln X_B.
fn omega_native(side: Side, p: &MonodromyPoint, d: &DualMonodromyPoint, jac: &DualJacobian) -> Result<[C64; 3]> {
    const OP: &str = "omega_3pt";
    let m = p.m;
    let em = [ZERO, ZERO, ONE];
    match side {
        Side::A => {
            let a = p.a;
            let (ra, rm) = dln_r(a, m, OP)?;
            let xa_a = 2.0 * (psi(2.0 * a + m, OP)? - psi(2.0 * a - m, OP)?);
            let xa_m = -4.0 * LN_2 + psi(2.0 * a + m, OP)? - psi(0.5 - m, OP)? + psi(2.0 * a - m, OP)? - psi(0.5 + m, OP)?;
            let z = dln_z(d.at, p.nu, m);
            let dz = lift(jac, z[0], ZERO);
            let dz = [dz[0], dz[1] + z[1], dz[2] + z[2]];
            Ok([2.0 * a * ra + m * (-dz[0] + xa_a), I * a - m * dz[1], 2.0 * a * rm + m * (-dz[2] + xa_m)])
        }
        Side::B => {
            let at = d.at;
            let (ra, rm) = dln_r(at, m, OP)?;
            let xb_a = 2.0 * (-psi(1.0 - 2.0 * at + m, OP)? + psi(1.0 - 2.0 * at - m, OP)?);
            let xb_m = -4.0 * LN_2 + psi(1.0 - 2.0 * at + m, OP)? - psi(0.5 - m, OP)? + psi(1.0 - 2.0 * at - m, OP)? - psi(0.5 + m, OP)?;
            Ok([0, 1, 2].map(|k| at * (I * jac.dnut[k] + 2.0 * (ra * jac.dat[k] + rm * em[k])) + m * (xb_a * jac.dat[k] + xb_m * em[k])))
        }
    }
}

/// ω₃pt on the given side with the canonical δ choices, expanded in `chart`.
pub fn omega_3pt(side: Side, p: &MonodromyPoint, chart: Chart, _ctx: &PrecisionContext) -> Result<OneForm> {
    let (d, _) = dual_from_primal(p)?;
    let jac = dual_jacobian(p, &d)?;
    let w = OneForm { chart: Chart::ANuM, c: omega_native(side, p, &d, &jac)? };
    w.to_chart(chart, p)
}

/// −tr(−x σ₃ dG₋G₋⁻¹ + x σ₃ dG₊G₊⁻¹ + m σ₃ dG₀G₀⁻¹) by central differences of
/// the frames in chart (a, ν, m), with the sign of `omega_3pt`.
pub fn omega_3pt_fd(side: Side, p: &MonodromyPoint, ov: &FrameOverrides, ctx: &PrecisionContext) -> Result<OneForm> {
    let f0 = frames(side, p, ov)?;
    let inv = |g: Mat2| g.inv().ok_or_else(|| degenerate("omega_3pt_fd", "singular frame"));
    let (gmi, g0i, gpi) = (inv(f0.g_minus)?, inv(f0.g_zero)?, inv(f0.g_plus)?);
    let s3 = Mat2::sigma3();
    let coords = [p.a, p.nu, p.m];
    let mut c = [ZERO; 3];
    for (k, ck) in c.iter_mut().enumerate() {
        let h = ctx.fd_step * coords[k].norm().max(1.0);
        let shifted = |s: f64| {
            let mut q = coords;
            q[k] += s * h;
            frames(side, &MonodromyPoint::new(q[0], q[1], q[2]), ov)
        };
        let (fp, fm) = (shifted(1.0)?, shifted(-1.0)?);
        let dg = |a: Mat2, b: Mat2| (a - b).scale(C64::from(0.5 / h));
        let x = f0.exponent;
        let t = (s3 * dg(fp.g_minus, fm.g_minus) * gmi).trace() * (-x)
            + (s3 * dg(fp.g_plus, fm.g_plus) * gpi).trace() * x
            + (s3 * dg(fp.g_zero, fm.g_zero) * g0i).trace() * f0.m;
        *ck = t;
    }
    Ok(OneForm { chart: Chart::ANuM, c })
}

/// d log Υ_S in chart (a, ν, m), differentiating the Barnes product through
/// the dual map.
pub fn dlog_upsilon(p: &MonodromyPoint, _ctx: &PrecisionContext) -> Result<[C64; 3]> {
    let (d, _) = dual_from_primal(p)?;
    let jac = dual_jacobian(p, &d)?;
    dlog_upsilon_with(p, &d, &jac)
}

fn dlog_upsilon_with(p: &MonodromyPoint, d: &DualMonodromyPoint, jac: &DualJacobian) -> Result<[C64; 3]> {
    let (a, m, at, nut) = (p.a, p.m, d.at, d.nut);
    let g = dln_barnes_g1p;
    // half(x) = ln G(1+2x) + ln G(1−2x) − ln G(1+2x−m) − ln G(1−2x−m)
    let half_x = |x: C64| 2.0 * (g(2.0 * x) - g(-2.0 * x) - g(2.0 * x - m) + g(-2.0 * x - m));
    let half_m = |x: C64| g(2.0 * x - m) + g(-2.0 * x - m);
    let q = nut / (4.0 * PI);
    let h = dln_ghat;
    let (up, um, vp, vm) = (h(a - m / 2.0 + q), h(a - m / 2.0 - q), h(a + m / 2.0 + q), h(a + m / 2.0 - q));
    let d_a = half_x(a) + up + um - vp - vm;
    let d_at = -half_x(at) + I * nut;
    let d_nut = I * at + (up - um - vp + vm) / (4.0 * PI);
    let d_m = half_m(a) - half_m(at) - 0.5 * (up + um + vp + vm) + LN_2PI + h(m) - PI * I * m;
    let l = lift(jac, d_at, d_nut);
    Ok([l[0] + d_a, l[1], l[2] + d_m])
}

/// d log Υ_S − (−ω^A + ω^B), componentwise in chart (a, ν, m).
pub fn upsilon_dlog_residual(p: &MonodromyPoint, _ctx: &PrecisionContext) -> Result<[C64; 3]> {
    let (d, _) = dual_from_primal(p)?;
    let jac = dual_jacobian(p, &d)?;
    let du = dlog_upsilon_with(p, &d, &jac)?;
    let wa = omega_native(Side::A, p, &d, &jac)?;
    let wb = omega_native(Side::B, p, &d, &jac)?;
    Ok([0, 1, 2].map(|k| du[k] - (wb[k] - wa[k])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt() -> MonodromyPoint {
        MonodromyPoint::real(0.23, 1.1, 0.17)
    }

    #[test]
    fn residual_vanishes() {
        let r = upsilon_dlog_residual(&pt(), &PrecisionContext::default()).unwrap();
        assert!(r.iter().all(|x| x.norm() < 1e-8), "{r:?}");
    }

    #[test]
    fn closed_form_matches_frames() {
        let ctx = PrecisionContext::default();
        for side in [Side::A, Side::B] {
            let w = omega_3pt(side, &pt(), Chart::ANuM, &ctx).unwrap();
            let f = omega_3pt_fd(side, &pt(), &FrameOverrides::default(), &ctx).unwrap();
            for k in 0..3 {
                assert!((w.c[k] - f.c[k]).norm() < 1e-6, "{side:?} {k} {:?} {:?}", w.c, f.c);
            }
        }
    }
}
