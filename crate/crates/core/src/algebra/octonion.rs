//! Octonions built by Cayley–Dickson doubling of the quaternions.
//!
//! An octonion is a pair `(a, b)` of quaternions with components
//! `c0..c3 = a`, `c4..c7 = b`, so `e4 = (0, 1)` is the doubling unit and
//! `(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;

pub type Matrix8 = SMatrix<f64, 8, 8>;
pub type Vector8 = SVector<f64, 8>;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ZERO: Octonion = Octonion([0.0; 8]);
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    /// Basis element `e_k`, `k` in `0..8`.
    pub fn basis(k: usize) -> Self {
        let mut c = [0.0; 8];
        c[k] = 1.0;
        Octonion(c)
    }

    pub fn from_pair(a: Quaternion, b: Quaternion) -> Self {
        let (a, b) = (a.to_array(), b.to_array());
        Octonion([a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]])
    }

    pub fn halves(self) -> (Quaternion, Quaternion) {
        let c = self.0;
        (Quaternion::new(c[0], c[1], c[2], c[3]), Quaternion::new(c[4], c[5], c[6], c[7]))
    }

    /// Embeds `H ⊂ O` as the first Cayley–Dickson half.
    pub fn from_quaternion(q: Quaternion) -> Self {
        Self::from_pair(q, Quaternion::ZERO)
    }

    pub fn from_vector(v: &Vector8) -> Self {
        let mut c = [0.0; 8];
        c.copy_from_slice(v.as_slice());
        Octonion(c)
    }

    pub fn to_vector(self) -> Vector8 {
        Vector8::from_column_slice(&self.0)
    }

    pub fn conj(self) -> Self {
        let mut c = self.0.map(|v| -v);
        c[0] = self.0[0];
        Octonion(c)
    }

    pub fn real(self) -> f64 {
        self.0[0]
    }

    pub fn imag(self) -> Self {
        let mut c = self.0;
        c[0] = 0.0;
        Octonion(c)
    }

    pub fn norm_sqr(self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn dot(self, o: Self) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }

    /// Matrix of `x ↦ self · x`.
    pub fn left_matrix(self) -> Matrix8 {
        let mut m = Matrix8::zeros();
        for k in 0..8 {
            let col = self * Octonion::basis(k);
            for r in 0..8 {
                m[(r, k)] = col.0[r];
            }
        }
        m
    }

    /// `(ab)c - a(bc)`.
    pub fn associator(a: Self, b: Self, c: Self) -> Self {
        (a * b) * c - a * (b * c)
    }
}

impl Add for Octonion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(o.0.iter()) {
            *x += y;
        }
        Octonion(c)
    }
}

impl Sub for Octonion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Octonion {
    type Output = Self;
    fn neg(self) -> Self {
        Octonion(self.0.map(|v| -v))
    }
}

impl Mul<f64> for Octonion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Octonion(self.0.map(|v| v * s))
    }
}

impl Mul for Octonion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = self.halves();
        let (c, d) = o.halves();
        Octonion::from_pair(a * c - d.conj() * b, d * a + b * c.conj())
    }
}
