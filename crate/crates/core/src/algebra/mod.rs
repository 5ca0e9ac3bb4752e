//! Quaternion and octonion algebra, SO(4) rotor pairs, the Stiefel/Grassmannian
//! maps `(e1, e2) ↦ (e2 ē1, ē1 e2)`, and the Hopf fibrations over S² and S⁶.

mod hopf;
mod octonion;
mod quaternion;
mod rotation;

pub use hopf::{fiber_point_near, hopf_left, rotor_to, spin7_hopf, spin7_hopf_from_matrix, Spin7Element};
pub use octonion::{Matrix8, Octonion, Vector8};
pub use quaternion::Quaternion;
pub use rotation::{
    matrix_to_rotor_pair, plane_from_rho_sigma, random_rotation4, rotor_pair_to_matrix, stiefel_rho_sigma, RotorPair,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for unit/orthonormality preconditions.
pub const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlgebraElement {
    Quat(Quaternion),
    Oct(Octonion),
}

impl AlgebraElement {
    pub fn dim(&self) -> usize {
        match self {
            AlgebraElement::Quat(_) => 4,
            AlgebraElement::Oct(_) => 8,
        }
    }

    /// Builds an element from 3 (Im H), 4 or 8 real coordinates.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        match v.len() {
            3 => Ok(AlgebraElement::Quat(Quaternion::imaginary(v[0], v[1], v[2]))),
            4 => Ok(AlgebraElement::Quat(Quaternion::new(v[0], v[1], v[2], v[3]))),
            8 => {
                let mut c = [0.0; 8];
                c.copy_from_slice(v);
                Ok(AlgebraElement::Oct(Octonion(c)))
            }
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        match self {
            AlgebraElement::Quat(q) => q.to_array().to_vec(),
            AlgebraElement::Oct(o) => o.0.to_vec(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (AlgebraElement::Quat(a), AlgebraElement::Quat(b)) => Ok(AlgebraElement::Quat(*a * *b)),
            (AlgebraElement::Oct(a), AlgebraElement::Oct(b)) => Ok(AlgebraElement::Oct(*a * *b)),
            (a, b) => Err(Error::MixedAlgebra(a.dim(), b.dim())),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            AlgebraElement::Quat(q) => AlgebraElement::Quat(q.conj()),
            AlgebraElement::Oct(o) => AlgebraElement::Oct(o.conj()),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            AlgebraElement::Quat(q) => q.norm(),
            AlgebraElement::Oct(o) => o.norm(),
        }
    }

    pub fn real(&self) -> f64 {
        match self {
            AlgebraElement::Quat(q) => q.w,
            AlgebraElement::Oct(o) => o.0[0],
        }
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (AlgebraElement::Quat(a), AlgebraElement::Quat(b)) => Ok(a.dot(*b)),
            (AlgebraElement::Oct(a), AlgebraElement::Oct(b)) => Ok(a.dot(*b)),
            (a, b) => Err(Error::MixedAlgebra(a.dim(), b.dim())),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        match self {
            AlgebraElement::Quat(q) => AlgebraElement::Quat(*q * s),
            AlgebraElement::Oct(o) => AlgebraElement::Oct(*o * s),
        }
    }

    pub fn as_quaternion(&self) -> Option<Quaternion> {
        match self {
            AlgebraElement::Quat(q) => Some(*q),
            AlgebraElement::Oct(_) => None,
        }
    }

    pub fn as_octonion(&self) -> Octonion {
        match self {
            AlgebraElement::Quat(q) => Octonion::from_quaternion(*q),
            AlgebraElement::Oct(o) => *o,
        }
    }
}

/// Ambient algebra together with the distinguished unit imaginary `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraContext {
    pub dim: usize,
    pub u: AlgebraElement,
}

impl AlgebraContext {
    /// `H` with `u = j`.
    pub fn quaternionic() -> Self {
        Self { dim: 4, u: AlgebraElement::Quat(Quaternion::J) }
    }

    /// `O` with `u = e1`.
    pub fn octonionic() -> Self {
        Self { dim: 8, u: AlgebraElement::Oct(Octonion::basis(1)) }
    }

    pub fn with_u(dim: usize, u: AlgebraElement) -> Result<Self> {
        if u.dim() != dim {
            return Err(Error::MixedAlgebra(dim, u.dim()));
        }
        if (u.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(u.norm()));
        }
        if u.real().abs() > UNIT_TOL {
            return Err(Error::NotImaginary(u.real()));
        }
        Ok(Self { dim, u })
    }

    pub fn u_quaternion(&self) -> Quaternion {
        self.u.as_quaternion().unwrap_or(Quaternion::J)
    }

    pub fn u_octonion(&self) -> Octonion {
        self.u.as_octonion()
    }

    /// Complex structure `J = L_i` on `H ≅ C²`.
    pub fn complex_structure(&self) -> nalgebra::Matrix4<f64> {
        Quaternion::I.left_matrix()
    }
}
