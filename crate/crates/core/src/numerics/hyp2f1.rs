//! Gauss hypergeometric function ₂F₁ on the principal sheet (cut [1, ∞)).

use super::gamma::{is_nonpositive_integer, ln_gamma, rgamma};
use crate::context::PrecisionContext;
use crate::error::{degenerate, Error, Result};
use num_complex::Complex64 as C64;

const OP: &str = "gauss_2f1";
/// Radius used for the direct and transformed series.
pub const SERIES_RADIUS: f64 = 0.5;

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    OneMinusX,
    Inverse,
    Recentered,
}

fn near_integer(z: C64) -> bool {
    z.im.abs() < 1e-12 && (z.re - z.re.round()).abs() < 1e-12
}

/// Taylor series at 0 together with its derivative; requires x ≠ 0.
fn series(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    if is_nonpositive_integer(c) {
        return Err(degenerate(OP, format!("c = {c} is a non-positive integer")));
    }
    let tol = ctx.series_tol() * 1e-2;
    let budget = 4 * ctx.term_budget();
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut nsum = C64::new(0.0, 0.0);
    for n in 0..budget {
        let nf = n as f64;
        term = term * (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        nsum += term * (nf + 1.0);
        if term.norm() * (nf + 1.0) <= tol * sum.norm().max(1e-300) && n > 2 {
            return Ok((sum, nsum / x));
        }
        if term.norm() == 0.0 {
            return Ok((sum, if x.norm() == 0.0 { a * b / c } else { nsum / x }));
        }
    }
    Err(Error::Convergence { op: OP, terms: budget })
}

/// ₂F₁(a, b; c; x) and its x-derivative.
pub fn hyp2f1_with_derivative(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<(C64, C64, Route)> {
    if is_nonpositive_integer(c) {
        return Err(degenerate(OP, format!("c = {c} is a non-positive integer")));
    }
    if x.norm() == 0.0 {
        return Ok((C64::new(1.0, 0.0), a * b / c, Route::Direct));
    }
    if x.norm() <= SERIES_RADIUS {
        let (f, d) = series(a, b, c, x, ctx)?;
        return Ok((f, d, Route::Direct));
    }
    if (1.0 - x).norm() <= SERIES_RADIUS {
        let (f, d) = one_minus_x(a, b, c, x, ctx)?;
        return Ok((f, d, Route::OneMinusX));
    }
    if x.norm() >= 1.0 / SERIES_RADIUS {
        let (f, d) = inverse(a, b, c, x, ctx)?;
        return Ok((f, d, Route::Inverse));
    }
    let (f, d) = recenter(a, b, c, x, ctx)?;
    Ok((f, d, Route::Recentered))
}

pub fn hyp2f1(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<C64> {
    hyp2f1_with_derivative(a, b, c, x, ctx).map(|r| r.0)
}

/// Γ(p1)Γ(p2)/(Γ(q1)Γ(q2)) with reciprocal gammas absorbing poles downstairs.
fn gamma_ratio(p: [C64; 2], q: [C64; 2]) -> Result<C64> {
    for z in p {
        if is_nonpositive_integer(z) {
            return Err(degenerate(OP, format!("gamma argument {z} is a non-positive integer")));
        }
    }
    let lp = ln_gamma(p[0]) + ln_gamma(p[1]);
    Ok(lp.exp() * rgamma(q[0]) * rgamma(q[1]))
}

fn one_minus_x(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    let s = c - a - b;
    if near_integer(s) {
        return Err(degenerate(OP, format!("c − a − b = {s} is an integer")));
    }
    let w = 1.0 - x;
    let k1 = gamma_ratio([c, s], [c - a, c - b])?;
    let k2 = gamma_ratio([c, -s], [a, b])?;
    let (f1, d1) = series(a, b, 1.0 - s, w, ctx)?;
    let (f2, d2) = series(c - a, c - b, 1.0 + s, w, ctx)?;
    let ws = (s * w.ln()).exp();
    let f = k1 * f1 + k2 * ws * f2;
    // d/dx = −d/dw
    let df = -(k1 * d1 + k2 * (s * ws / w * f2 + ws * d2));
    Ok((f, df))
}

fn inverse(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    let d = b - a;
    if near_integer(d) {
        return Err(degenerate(OP, format!("b − a = {d} is an integer")));
    }
    let y = 1.0 / x;
    let lmx = (-x).ln();
    let k1 = gamma_ratio([c, d], [b, c - a])?;
    let k2 = gamma_ratio([c, -d], [a, c - b])?;
    let (f1, d1) = series(a, a - c + 1.0, 1.0 - d, y, ctx)?;
    let (f2, d2) = series(b, b - c + 1.0, 1.0 + d, y, ctx)?;
    let p1 = (-a * lmx).exp();
    let p2 = (-b * lmx).exp();
    let f = k1 * p1 * f1 + k2 * p2 * f2;
    // dy/dx = −y², d(−x)^{−a}/dx = −a(−x)^{−a}/x
    let df = k1 * (-a * p1 / x * f1 - p1 * d1 * y * y) + k2 * (-b * p2 / x * f2 - p2 * d2 * y * y);
    Ok((f, df))
}

/// Analytic continuation by re-expanding the hypergeometric ODE along the
/// ray from the origin to x.
pub fn recenter(a: C64, b: C64, c: C64, x: C64, ctx: &PrecisionContext) -> Result<(C64, C64)> {
    let dir = x / x.norm();
    let mut x0 = dir * (0.9 * SERIES_RADIUS).min(x.norm());
    let (mut f, mut d) = series(a, b, c, x0, ctx)?;
    let tol = ctx.series_tol() * 1e-2;
    let budget = 8 * ctx.term_budget();
    for _ in 0..10_000 {
        let remain = x - x0;
        if remain.norm() == 0.0 {
            return Ok((f, d));
        }
        let radius = x0.norm().min((1.0 - x0).norm());
        let h = if remain.norm() <= 0.5 * radius { remain } else { remain / remain.norm() * (0.5 * radius) };
        let p0 = x0 * (1.0 - x0);
        let p1 = 1.0 - 2.0 * x0;
        let q0 = c - (a + b + 1.0) * x0;
        let q1 = -(a + b + 1.0);
        let ab = a * b;
        // coefficients f_n of F(x0 + t)
        let (mut fm, mut fn1) = (f, d);
        let mut val = fm + fn1 * h;
        let mut der = fn1;
        let mut hp = h;
        let mut converged = false;
        for n in 0..budget {
            let nf = n as f64;
            let fn2 = -((p1 * nf + q0) * (nf + 1.0) * fn1 + (-(nf * (nf - 1.0)) + q1 * nf - ab) * fm) / (p0 * (nf + 2.0) * (nf + 1.0));
            der += fn2 * (nf + 2.0) * hp;
            hp *= h;
            let t = fn2 * hp;
            val += t;
            fm = fn1;
            fn1 = fn2;
            if t.norm() <= tol * val.norm().max(1e-300) && (fn2 * hp * (nf + 2.0)).norm() <= tol * der.norm().max(1e-300) && n > 2 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence { op: OP, terms: budget });
        }
        f = val;
        d = der;
        x0 += h;
    }
    Err(Error::Convergence { op: OP, terms: budget })
}
