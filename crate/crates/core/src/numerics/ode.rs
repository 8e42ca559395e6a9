//! Dormand–Prince 5(4) with PI step control for complex-valued systems
//! over a real parameter.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step as a fraction of the interval.
    pub h0: f64,
}

impl Default for RkConfig {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 200_000, h0: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RkStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[C64; N], terms: &[(f64, &[C64; N])], h: f64) -> [C64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

/// Integrates y' = f(t, y) from t0 to t1. `observer` sees every accepted step.
pub fn dopri5<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [C64; N],
    cfg: &RkConfig,
    mut observer: O,
) -> Result<([C64; N], RkStats)>
where
    F: FnMut(f64, &[C64; N]) -> Result<[C64; N]>,
    O: FnMut(f64, &[C64; N]),
{
    let span = t1 - t0;
    let dir = span.signum();
    let mut stats = RkStats::default();
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = cfg.h0 * span.abs();
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;
    let mut err_prev: f64 = 1e-4;
    observer(t, &y);
    while (t1 - t) * dir > 0.0 {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::Integration { tau: C64::new(t, 0.0), reason: format!("max_steps = {} exceeded", cfg.max_steps) });
        }
        let last = h >= (t1 - t).abs();
        if last {
            h = (t1 - t).abs();
        }
        let hs = h * dir;
        let k2 = f(t + C2 * hs, &axpy(&y, &[(A21, &k1)], hs))?;
        let k3 = f(t + C3 * hs, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs))?;
        let k4 = f(t + C4 * hs, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs))?;
        let k5 = f(t + C5 * hs, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs))?;
        let k6 = f(t + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs))?;
        let ynew = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let k7 = f(t + hs, &ynew)?;
        stats.evaluations += 6;
        let mut acc = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(ynew[i].norm());
            acc += (e.norm() / sc).powi(2);
        }
        let err = (acc / N as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration { tau: C64::new(t, 0.0), reason: "non-finite error estimate".into() });
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = ynew;
            k1 = k7;
            stats.accepted += 1;
            observer(t, &y);
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            err_prev = err.max(1e-4);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h < 1e-14 * span.abs() {
            return Err(Error::Integration { tau: C64::new(t, 0.0), reason: "step size underflow".into() });
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_exponential() {
        let lam = C64::new(-0.3, 2.0);
        let (y, st) = dopri5(|_, y: &[C64; 1]| Ok([lam * y[0]]), 0.0, 3.0, [C64::new(1.0, 0.0)], &RkConfig::default(), |_, _| {}).unwrap();
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-9);
        assert!(st.accepted > 10);
    }

    #[test]
    fn backwards() {
        let (y, _) =
            dopri5(|t, _: &[C64; 1]| Ok([C64::new(t.cos(), 0.0)]), 2.0, 0.0, [C64::new(2f64.sin(), 0.0)], &RkConfig::default(), |_, _| {})
                .unwrap();
        assert!(y[0].norm() < 1e-10);
    }
}
