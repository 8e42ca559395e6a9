//! Dense 2×2 complex matrices.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::diag(C64::new(1.0, 0.0), C64::new(1.0, 0.0))
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2([[z, z], [z, z]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Mat2([[a, z], [z, d]])
    }

    pub fn sigma3() -> Self {
        Self::diag(C64::new(1.0, 0.0), C64::new(-1.0, 0.0))
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse, or `None` when the determinant vanishes.
    pub fn inv(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let [[a, b], [c, e]] = self.0;
        Some(Mat2([[e / d, -b / d], [-c / d, a / d]]))
    }

    pub fn scale(&self, s: C64) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a * s, b * s], [c * s, d * s]])
    }

    /// Max-abs entry norm.
    pub fn norm_max(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// Eigenvalues of a 2×2 matrix.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let t = self.trace() * 0.5;
        let s = (t * t - self.det()).sqrt();
        (t + s, t - s)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut r = self.0;
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] += o.0[i][j];
            }
        }
        Mat2(r)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut r = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Mat2::new(C64::new(1.0, 2.0), C64::new(0.5, 0.0), C64::new(-0.3, 0.1), C64::new(2.0, -1.0));
        let e = m * m.inv().unwrap() - Mat2::identity();
        assert!(e.norm_max() < 1e-15);
    }

    #[test]
    fn eigenvalues_of_diag() {
        let (x, y) = Mat2::diag(C64::new(3.0, 0.0), C64::new(-1.0, 0.0)).eigenvalues();
        assert!((x - 3.0).norm() < 1e-15 && (y + 1.0).norm() < 1e-15);
    }
}
