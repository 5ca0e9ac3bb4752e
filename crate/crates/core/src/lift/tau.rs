//! The order-four automorphism `τ(R, X) = (L_u R L_u⁻¹, −L_u X)` and its
//! eigenspace projectors, realised by conjugation with `T = diag(L_u, −1)` in
//! the homogeneous representation.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, AlgebraElement, Matrix8, Octonion, Quaternion};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    /// `{L_p} ⋉ H`
    Spin3,
    So4,
    /// Commutant of `L_i` in SO(4), acting on `C²`.
    U2,
    /// `{L_{e^{it}}} ⋉ C²`
    U1,
    Spin7,
}

impl Group {
    /// Dimension `n` of the translation part.
    pub fn n(&self) -> usize {
        match self {
            Group::Spin7 => 8,
            _ => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Group::Spin3 => "Spin3⋉H",
            Group::So4 => "SO(4)⋉R4",
            Group::U2 => "U(2)⋉C2",
            Group::U1 => "U(1)⋉C2",
            Group::Spin7 => "Spin7⋉O",
        }
    }
}

/// Eigenvalue exponents in the order used throughout: `i^k` for
/// `k = −1, 0, 1, 2`.
pub const GRADES: [i32; 4] = [-1, 0, 1, 2];

pub(crate) fn grade_index(k: i32) -> usize {
    (k + 1) as usize
}

fn embed(block: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(block);
    m
}

fn dyn4(m: nalgebra::Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}

fn dyn8(m: Matrix8) -> DMatrix<f64> {
    DMatrix::from_column_slice(8, 8, m.as_slice())
}

fn gram_schmidt(candidates: impl IntoIterator<Item = DMatrix<f64>>) -> Vec<DMatrix<f64>> {
    let mut basis: Vec<DMatrix<f64>> = Vec::new();
    for mut c in candidates {
        for b in &basis {
            let d = c.dot(b);
            c -= b * d;
        }
        let n = c.norm();
        if n > 1e-9 {
            basis.push(c / n);
        }
    }
    basis
}

/// Orthonormal basis of spin(7) ⊂ so(8) from the products `L_a L_b`, `a < b`.
pub fn spin7_algebra() -> &'static [DMatrix<f64>] {
    static BASIS: OnceLock<Vec<DMatrix<f64>>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let l: Vec<Matrix8> = (1..8).map(|k| Octonion::basis(k).left_matrix()).collect();
        let products = (0..7).flat_map(|a| ((a + 1)..7).map(move |b| (a, b)));
        let basis = gram_schmidt(products.map(|(a, b)| dyn8(l[a] * l[b])));
        debug_assert_eq!(basis.len(), 21);
        basis
    })
}

fn rotation_algebra(group: Group) -> Vec<DMatrix<f64>> {
    let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
    match group {
        Group::Spin3 => gram_schmidt([i, j, k].map(|q| dyn4(q.left_matrix()))),
        Group::U1 => gram_schmidt([dyn4(i.left_matrix())]),
        Group::U2 => gram_schmidt([
            dyn4(i.left_matrix()),
            dyn4(i.right_matrix()),
            dyn4(j.right_matrix()),
            dyn4(k.right_matrix()),
        ]),
        Group::So4 => gram_schmidt((0..4).flat_map(|a| ((a + 1)..4).map(move |b| (a, b))).map(|(a, b)| {
            let mut e = DMatrix::zeros(4, 4);
            e[(a, b)] = -1.0;
            e[(b, a)] = 1.0;
            e
        })),
        Group::Spin7 => spin7_algebra().to_vec(),
    }
}

#[derive(Debug, Clone)]
pub struct TauAction {
    pub group: Group,
    pub u: AlgebraElement,
    /// `diag(L_u, −1)`
    pub t: DMatrix<f64>,
    /// Orthonormal real basis of 𝔤: rotations, then translations.
    pub basis: Vec<DMatrix<f64>>,
    /// `τ_*` in basis coordinates.
    pub matrix: DMatrix<f64>,
    /// `P_k` in basis coordinates, indexed by `k + 1`.
    pub projectors: [DMatrix<Complex64>; 4],
}

pub fn build_tau(group: Group, ctx: &AlgebraContext) -> Result<TauAction> {
    let n = group.n();
    if ctx.dim != n {
        return Err(Error::MixedAlgebra(n, ctx.dim));
    }
    let lu = match ctx.u {
        AlgebraElement::Quat(q) => dyn4(q.left_matrix()),
        AlgebraElement::Oct(o) => dyn8(o.left_matrix()),
    };
    let mut t = DMatrix::zeros(n + 1, n + 1);
    t.view_mut((0, 0), (n, n)).copy_from(&lu);
    t[(n, n)] = -1.0;

    let mut basis: Vec<DMatrix<f64>> = rotation_algebra(group).iter().map(|b| embed(b, n)).collect();
    for k in 0..n {
        let mut e = DMatrix::zeros(n + 1, n + 1);
        e[(k, n)] = 1.0;
        basis.push(e);
    }
    let dim = basis.len();
    let t_inv = t.transpose();
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut leak: f64 = 0.0;
    for (c, b) in basis.iter().enumerate() {
        let img = &t * b * &t_inv;
        let mut rest = img.clone();
        for (r, e) in basis.iter().enumerate() {
            let coef = img.dot(e);
            matrix[(r, c)] = coef;
            rest -= e * coef;
        }
        leak = leak.max(rest.norm());
    }
    if leak > 1e-10 {
        return Err(Error::DimensionMismatch(format!(
            "τ does not preserve the {} algebra (leak {leak:e})",
            group.name()
        )));
    }
    let m4 = matrix.pow(4);
    let order = (m4 - DMatrix::identity(dim, dim)).abs().max();
    if order > 1e-12 {
        return Err(Error::TauOrder(order));
    }
    let mc = matrix.map(Complex64::from);
    let powers: Vec<DMatrix<Complex64>> = (0..4).map(|m| mc.pow(m as u32)).collect();
    let projectors = GRADES.map(|k| {
        let mut p = DMatrix::zeros(dim, dim);
        for (m, pw) in powers.iter().enumerate() {
            p += pw * Complex64::i().powi(-k * m as i32);
        }
        p * Complex64::from(0.25)
    });
    Ok(TauAction { group, u: ctx.u, t, basis, matrix, projectors })
}

impl TauAction {
    pub fn n(&self) -> usize {
        self.group.n()
    }

    pub fn apply(&self, xi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let t = self.t.map(Complex64::from);
        &t * xi * t.transpose()
    }

    /// `P_k ξ = ¼ Σ_m i^{−km} τ^m ξ` applied to a homogeneous matrix.
    pub fn project(&self, k: i32, xi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut acc = xi.clone();
        let mut cur = xi.clone();
        for m in 1..4 {
            cur = self.apply(&cur);
            acc += &cur * Complex64::i().powi(-k * m);
        }
        acc * Complex64::from(0.25)
    }

    /// Complex dimensions of `(𝔤₋₁, 𝔤₀^ℂ, 𝔤₁, 𝔤₂^ℂ)`.
    pub fn eigenspace_dims(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|idx| self.projectors[idx].trace().re.round() as usize)
    }

    /// Coordinates in [`TauAction::basis`].
    pub fn coords(&self, xi: &DMatrix<Complex64>) -> Vec<Complex64> {
        self.basis.iter().map(|b| xi.iter().zip(b.iter()).map(|(a, c)| a * c).sum()).collect()
    }

    pub fn from_coords(&self, c: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.n() + 1;
        let mut m = DMatrix::zeros(n, n);
        for (coef, b) in c.iter().zip(&self.basis) {
            m += b.map(Complex64::from) * *coef;
        }
        m
    }
}
