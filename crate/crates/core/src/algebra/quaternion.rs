//! Real quaternions in the basis (1, i, j, k).

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_vector(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    /// Pure imaginary quaternion `a i + b j + c k`.
    pub fn imaginary(a: f64, b: f64, c: f64) -> Self {
        Self::new(0.0, a, b, c)
    }

    /// `cos t + sin t · axis`; `axis` should be unit imaginary.
    pub fn exp_axis(axis: Quaternion, t: f64) -> Self {
        Quaternion::ONE * t.cos() + axis * t.sin()
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn dot(self, o: Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn inverse(self) -> Self {
        self.conj() * (1.0 / self.norm_sqr())
    }

    pub fn real(self) -> f64 {
        self.w
    }

    pub fn imag(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    /// Matrix of `z ↦ self · z` acting on coordinates (1, i, j, k).
    pub fn left_matrix(self) -> Matrix4<f64> {
        let Quaternion { w, x, y, z } = self;
        Matrix4::new(
            w, -x, -y, -z, //
            x, w, -z, y, //
            y, z, w, -x, //
            z, -y, x, w,
        )
    }

    /// Matrix of `z ↦ z · self`.
    pub fn right_matrix(self) -> Matrix4<f64> {
        let Quaternion { w, x, y, z } = self;
        Matrix4::new(
            w, -x, -y, -z, //
            x, w, z, -y, //
            y, -z, w, x, //
            z, y, -x, w,
        )
    }

    /// Complex coordinates `(z1, z2)` under `z1 + z2 j`.
    pub fn to_c2(self) -> (num_complex::Complex64, num_complex::Complex64) {
        (num_complex::Complex64::new(self.w, self.x), num_complex::Complex64::new(self.y, self.z))
    }

    pub fn from_c2(z1: num_complex::Complex64, z2: num_complex::Complex64) -> Self {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Self::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_table() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        assert_eq!(Q::J * Q::I, -Q::K);
        assert_eq!(Q::I * Q::I, -Q::ONE);
    }

    #[test]
    fn mixed_product_by_i() {
        // (1+2i+3j+4k) i = i - 2 - 3k + 4j
        let a = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a * Quaternion::I, Quaternion::new(-2.0, 1.0, 4.0, -3.0));
    }

    #[test]
    fn matrices_match_products() {
        let a = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let b = Quaternion::new(-0.5, 0.25, 1.5, -0.75);
        let lhs = Quaternion::from_vector(&(a.left_matrix() * b.to_vector()));
        let rhs = Quaternion::from_vector(&(b.right_matrix() * a.to_vector()));
        assert!((lhs - a * b).norm() < 1e-14);
        assert!((rhs - a * b).norm() < 1e-14);
    }

    #[test]
    fn c2_identification() {
        // z1 + z2 j with z1 = 1 + 2i, z2 = 3 + 4i  ->  1 + 2i + 3j + 4k
        let q = Quaternion::from_c2(num_complex::Complex64::new(1.0, 2.0), num_complex::Complex64::new(3.0, 4.0));
        let z2j = Quaternion::new(3.0, 4.0, 0.0, 0.0) * Quaternion::J;
        assert_eq!(q, Quaternion::new(1.0, 2.0, 0.0, 0.0) + z2j);
    }
}
