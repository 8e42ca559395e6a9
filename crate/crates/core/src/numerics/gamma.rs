//! Complex log-gamma and digamma.
//!
//! Both use upward recurrence into the Stirling region; no reflection is
//! applied, so `ln_gamma` is the analytic branch with its cut on the negative
//! real axis (values on the cut are the limits from above).

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// B_{2k} for k = 1..=10.
pub(crate) const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const STIRLING_MIN: f64 = 15.0;

/// True when `z` is a non-positive integer.
pub fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn shift_count(z: C64) -> usize {
    if z.re >= STIRLING_MIN {
        0
    } else {
        (STIRLING_MIN - z.re).ceil() as usize
    }
}

/// ln Γ(z); infinite at the poles.
pub fn ln_gamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(f64::INFINITY, 0.0);
    }
    let n = shift_count(z);
    let w = z + n as f64;
    let mut s = (w - 0.5) * w.ln() - w + 0.5 * LN_2PI;
    let w2 = 1.0 / (w * w);
    let mut wp = 1.0 / w;
    for (k, b) in BERNOULLI_2K.iter().enumerate().take(8) {
        let k2 = 2.0 * (k as f64 + 1.0);
        s += wp * (b / (k2 * (k2 - 1.0)));
        wp *= w2;
    }
    for k in 0..n {
        s -= (z + k as f64).ln();
    }
    s
}

pub fn gamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(f64::INFINITY, 0.0);
    }
    ln_gamma(z).exp()
}

/// 1/Γ(z), exactly zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(0.0, 0.0);
    }
    (-ln_gamma(z)).exp()
}

/// ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(f64::INFINITY, 0.0);
    }
    let n = shift_count(z);
    let w = z + n as f64;
    let mut s = w.ln() - 0.5 / w;
    let w2 = 1.0 / (w * w);
    let mut wp = w2;
    for (k, b) in BERNOULLI_2K.iter().enumerate().take(8) {
        let k2 = 2.0 * (k as f64 + 1.0);
        s -= wp * (b / k2);
        wp *= w2;
    }
    for k in 0..n {
        s -= 1.0 / (z + k as f64);
    }
    s
}

/// π·cot(πz), evaluated stably for large |Im z|.
pub fn pi_cot_pi(z: C64) -> C64 {
    let i = C64::new(0.0, 1.0);
    if z.im > 0.0 {
        let e = (2.0 * PI * i * z).exp();
        PI * i * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-2.0 * PI * i * z).exp();
        -PI * i * (e + 1.0) / (e - 1.0)
    }
}

/// ln sin(πz) with the principal log of sin, computed without overflow.
pub fn ln_sin_pi(z: C64) -> C64 {
    let s = (PI * z).sin();
    if s.is_finite() && s.norm() > 1e-300 {
        s.ln()
    } else {
        let i = C64::new(0.0, 1.0);
        // Large |Im z|: sin πz ≈ ∓ e^{∓iπz}/2i.
        let t = if z.im > 0.0 { -i * PI * z } else { i * PI * z };
        let ln_half_i = if z.im > 0.0 { C64::new(-std::f64::consts::LN_2, PI / 2.0) } else { C64::new(-std::f64::consts::LN_2, -PI / 2.0) };
        t + ln_half_i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn factorials() {
        for n in 1..15 {
            let f: f64 = (1..n).map(|k| k as f64).product();
            assert!((gamma(c(n as f64, 0.0)).re / f - 1.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn half_integer() {
        assert!((gamma(c(0.5, 0.0)) - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)) + 2.0 * PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn reflection() {
        let z = c(0.3, 0.7);
        let lhs = gamma(z) * gamma(1.0 - z);
        let rhs = PI / (PI * z).sin();
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn digamma_matches_difference() {
        let z = c(0.37, -0.4);
        let h = 1e-5;
        let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
        assert!((fd - digamma(z)).norm() < 1e-9);
        assert!((digamma(c(1.0, 0.0)).re + 0.577_215_664_901_532_9).abs() < 1e-14);
    }

    #[test]
    fn rgamma_zero_at_poles() {
        assert_eq!(rgamma(c(-3.0, 0.0)), c(0.0, 0.0));
        assert_eq!(rgamma(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn cot_agrees() {
        let z = c(0.21, 0.3);
        let direct = PI * (PI * z).cos() / (PI * z).sin();
        assert!((pi_cot_pi(z) - direct).norm() < 1e-13);
        assert!((pi_cot_pi(c(0.21, -0.3)) - PI * (PI * c(0.21, -0.3)).cos() / (PI * c(0.21, -0.3)).sin()).norm() < 1e-13);
    }
}
