//! Barnes G-function in log space.

use super::gamma::{digamma, ln_gamma, pi_cot_pi, BERNOULLI_2K, LN_2PI};
use num_complex::Complex64 as C64;

const ZETA_PRIME_M1: f64 = -0.165_421_143_700_450_929_213_919_660_2;
const ASYMPTOTIC_MIN: f64 = 12.0;

/// True when G(1+z) vanishes, i.e. z ∈ {−1, −2, …}.
pub fn g1p_vanishes(z: C64) -> bool {
    z.im == 0.0 && z.re <= -1.0 && z.re == z.re.round()
}

/// ln G(1+z): asymptotic expansion for Re z > 12, shifted there through
/// G(2+z) = Γ(1+z)G(1+z).
pub fn ln_barnes_g1p(z: C64) -> C64 {
    if g1p_vanishes(z) {
        return C64::new(f64::NEG_INFINITY, 0.0);
    }
    let n = if z.re >= ASYMPTOTIC_MIN { 0 } else { (ASYMPTOTIC_MIN - z.re).ceil() as usize };
    let w = z + n as f64;
    let lw = w.ln();
    let mut s = 0.5 * w * w * (lw - 1.5) + 0.5 * w * LN_2PI - lw / 12.0 + ZETA_PRIME_M1;
    let w2 = 1.0 / (w * w);
    let mut wp = w2;
    for k in 1..=9usize {
        let b = BERNOULLI_2K[k];
        s += wp * (b / (4.0 * k as f64 * (k as f64 + 1.0)));
        wp *= w2;
    }
    if n > 0 {
        // subtract Σ_{k=1}^{n} ln Γ(z+k), walking down from ln Γ(z+n)
        let mut lg = ln_gamma(z + n as f64);
        for k in (1..=n).rev() {
            s -= lg;
            if k > 1 {
                lg -= (z + (k - 1) as f64).ln();
            }
        }
    }
    s
}

/// ln G(z).
pub fn ln_barnes_g(z: C64) -> C64 {
    ln_barnes_g1p(z - 1.0)
}

/// d/dz ln G(1+z) = ½(ln 2π − 1) − z + zψ(1+z).
pub fn dln_barnes_g1p(z: C64) -> C64 {
    0.5 * (LN_2PI - 1.0) - z + z * digamma(z + 1.0)
}

/// ln Ĝ(x) = ln G(1+x) − ln G(1−x).
pub fn ln_ghat(x: C64) -> C64 {
    ln_barnes_g1p(x) - ln_barnes_g1p(-x)
}

/// d/dx ln Ĝ(x) = ln 2π − πx·cot πx.
pub fn dln_ghat(x: C64) -> C64 {
    if x.norm() < 1e-8 {
        return C64::new(LN_2PI - 1.0, 0.0) + x * x * (std::f64::consts::PI.powi(2) / 3.0);
    }
    C64::new(LN_2PI, 0.0) - x * pi_cot_pi(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn small_integers() {
        for k in 1..=3 {
            assert!(ln_barnes_g(c(k as f64, 0.0)).norm() < 1e-13, "G({k})");
        }
        // G(4) = 2, G(5) = 12, G(6) = 288
        assert!((ln_barnes_g(c(4.0, 0.0)).re - 2f64.ln()).abs() < 1e-13);
        assert!((ln_barnes_g(c(6.0, 0.0)).re - 288f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn half_value() {
        // G(1/2) = 2^{1/24} e^{3ζ'(−1)/2} π^{−1/4}
        let expect = (1.0 / 24.0) * 2f64.ln() + 1.5 * ZETA_PRIME_M1 - 0.25 * std::f64::consts::PI.ln();
        assert!((ln_barnes_g(c(0.5, 0.0)).re - expect).abs() < 1e-13);
    }

    #[test]
    fn recurrence_off_axis() {
        let z = c(0.3, 1.7);
        let lhs = ln_barnes_g1p(z + 1.0) - ln_barnes_g1p(z);
        assert!((lhs - ln_gamma(z + 1.0)).norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_difference() {
        let z = c(0.4, -0.3);
        let h = 1e-5;
        let fd = (ln_barnes_g1p(z + h) - ln_barnes_g1p(z - h)) / (2.0 * h);
        assert!((fd - dln_barnes_g1p(z)).norm() < 1e-8);
        let fd = (ln_ghat(z + h) - ln_ghat(z - h)) / (2.0 * h);
        assert!((fd - dln_ghat(z)).norm() < 1e-8);
    }
}
