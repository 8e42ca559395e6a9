//! Complex dilogarithm with its cut on (1, ∞).

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Side of the cut (1, ∞) from which a value on the cut is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    Above,
    Below,
}

const PI2_6: f64 = PI * PI / 6.0;

/// B_n/(n+1)! for n = 0..=21 (odd n > 1 vanish).
const BERN_OVER_FACT: [f64; 22] = [
    1.0,
    -0.25,
    1.0 / 36.0,
    0.0,
    -1.0 / 3600.0,
    0.0,
    1.0 / 211_680.0,
    0.0,
    -1.0 / 10_886_400.0,
    0.0,
    1.0 / 526_901_760.0,
    0.0,
    -4.064_761_645_144_226e-11,
    0.0,
    8.921_691_020_456_453e-13,
    0.0,
    -1.993_929_586_072_107_6e-14,
    0.0,
    4.518_980_029_619_918e-16,
    0.0,
    -1.035_651_761_218_124_7e-17,
    0.0,
];

/// Series in u = −ln(1−z), valid for |u| < 2π.
fn bernoulli_series(z: C64) -> C64 {
    let u = -(1.0 - z).ln();
    let mut s = C64::new(0.0, 0.0);
    let mut p = u;
    for b in BERN_OVER_FACT.iter() {
        s += p * *b;
        p *= u;
    }
    s
}

/// Li₂(z) off the cut. Points exactly on (1, ∞) take the side `Above`.
pub fn li2(z: C64) -> C64 {
    li2_side(z, CutSide::Above)
}

pub fn li2_side(z: C64, side: CutSide) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return z;
    }
    if z == C64::new(1.0, 0.0) {
        return C64::new(PI2_6, 0.0);
    }
    let on_cut = z.im == 0.0 && z.re > 1.0;
    if on_cut {
        // Li₂(x ± i0) = Re Li₂(x) ± iπ ln x
        let x = z.re;
        let re = li2(C64::new(x, 1e-300)).re;
        let im = PI * x.ln();
        return match side {
            CutSide::Above => C64::new(re, im),
            CutSide::Below => C64::new(re, -im),
        };
    }
    if z.norm() > 1.0 {
        // Li₂(z) = −Li₂(1/z) − π²/6 − ½ln²(−z)
        let l = (-z).ln();
        return -li2_inner(1.0 / z) - PI2_6 - 0.5 * l * l;
    }
    li2_inner(z)
}

/// |z| ≤ 1.
fn li2_inner(z: C64) -> C64 {
    if z.re <= 0.5 {
        bernoulli_series(z)
    } else {
        // Li₂(z) = −Li₂(1−z) + π²/6 − ln z·ln(1−z)
        let w = 1.0 - z;
        let lz = z.ln();
        let lw = w.ln();
        let head = if w.norm() <= 1.0 && w.re <= 0.5 { bernoulli_series(w) } else { li2_side(w, CutSide::Above) };
        -head + PI2_6 - lz * lw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn direct(z: C64) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..400 {
            s += p / (k * k) as f64;
            p *= z;
        }
        s
    }

    #[test]
    fn small_series() {
        for z in [c(0.3, 0.2), c(-0.4, 0.1), c(0.1, -0.6), c(0.7, 0.3)] {
            assert!((li2(z) - direct(z)).norm() < 1e-14, "{z}");
        }
    }

    #[test]
    fn special_values() {
        assert!((li2(c(-1.0, 0.0)).re + PI * PI / 12.0).abs() < 1e-15);
        assert!((li2(c(0.5, 0.0)).re - (PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2))).abs() < 1e-15);
    }

    #[test]
    fn sides_differ_by_log() {
        let up = li2_side(c(3.0, 0.0), CutSide::Above);
        let dn = li2_side(c(3.0, 0.0), CutSide::Below);
        assert!((up - dn - c(0.0, 2.0 * PI * 3f64.ln())).norm() < 1e-13);
        let near = li2(c(3.0, 1e-12));
        assert!((near - up).norm() < 1e-10);
    }

    #[test]
    fn unit_circle() {
        // Re Li₂(e^{iθ}) = π²/6 − θ(2π−θ)/4
        for th in [0.3, 1.0, 2.5, 4.0, 6.0] {
            let v = li2(C64::from_polar(1.0, th));
            assert!((v.re - (PI2_6 - th * (2.0 * PI - th) / 4.0)).abs() < 1e-13, "θ={th}");
        }
    }
}
