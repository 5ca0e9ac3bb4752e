use nalgebra::{Matrix3, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{AlgebraElement, Quaternion, UNIT_TOL};
use crate::error::{Error, Result};

/// A pair of unit quaternions representing `R(z) = p z q̄`. The pairs
/// `(p, q)` and `(-p, -q)` give the same rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorPair {
    pub p: Quaternion,
    pub q: Quaternion,
}

impl RotorPair {
    pub fn new(p: Quaternion, q: Quaternion) -> Result<Self> {
        for n in [p.norm(), q.norm()] {
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::NotUnit(n));
            }
        }
        Ok(Self { p, q })
    }

    pub fn apply(&self, z: Quaternion) -> Quaternion {
        self.p * z * self.q.conj()
    }

    /// Same sign class.
    pub fn equivalent(&self, other: &Self, tol: f64) -> bool {
        let plus = (self.p - other.p).norm() + (self.q - other.q).norm();
        let minus = (self.p + other.p).norm() + (self.q + other.q).norm();
        plus.min(minus) < tol
    }
}

pub fn rotor_pair_to_matrix(rp: &RotorPair) -> Result<Matrix4<f64>> {
    let rp = RotorPair::new(rp.p, rp.q)?;
    Ok(rp.p.left_matrix() * rp.q.conj().right_matrix())
}

/// Inverse of [`rotor_pair_to_matrix`]; the representative has the first
/// nonzero component of `p` positive.
pub fn matrix_to_rotor_pair(m: &Matrix4<f64>) -> Result<RotorPair> {
    let defect = (m.transpose() * m - Matrix4::identity()).abs().max();
    if defect > 1e-10 {
        return Err(Error::NotOrthogonal(defect));
    }
    let det = m.determinant();
    if det < 0.0 {
        return Err(Error::NegativeDeterminant(det));
    }
    // c = R(1) = p q̄, and z ↦ R(z) c̄ = p z p̄ is a rotation of Im H.
    let c = Quaternion::from_vector(&m.column(0).into_owned());
    let c_bar = c.conj();
    let basis = [Quaternion::I, Quaternion::J, Quaternion::K];
    let mut rot = Matrix3::zeros();
    for (col, e) in basis.iter().enumerate() {
        let image = Quaternion::from_vector(&(m * e.to_vector())) * c_bar;
        rot[(0, col)] = image.x;
        rot[(1, col)] = image.y;
        rot[(2, col)] = image.z;
    }
    let mut p = quaternion_from_rotation(&rot);
    if let Some(first) = p.to_array().iter().find(|v| v.abs() > 1e-12) {
        if *first < 0.0 {
            p = -p;
        }
    }
    let q = (c_bar * p).normalize();
    Ok(RotorPair { p, q })
}

/// Shepperd's method: the unit quaternion `p` with `v ↦ p v p̄` equal to `rot`.
fn quaternion_from_rotation(r: &Matrix3<f64>) -> Quaternion {
    let trace = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
    let q = if trace > r[(0, 0)].max(r[(1, 1)]).max(r[(2, 2)]) {
        let s = (1.0 + trace).sqrt() * 2.0;
        Quaternion::new(0.25 * s, (r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s)
    } else if r[(0, 0)] >= r[(1, 1)] && r[(0, 0)] >= r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        Quaternion::new((r[(2, 1)] - r[(1, 2)]) / s, 0.25 * s, (r[(0, 1)] + r[(1, 0)]) / s, (r[(0, 2)] + r[(2, 0)]) / s)
    } else if r[(1, 1)] >= r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        Quaternion::new((r[(0, 2)] - r[(2, 0)]) / s, (r[(0, 1)] + r[(1, 0)]) / s, 0.25 * s, (r[(1, 2)] + r[(2, 1)]) / s)
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        Quaternion::new((r[(1, 0)] - r[(0, 1)]) / s, (r[(0, 2)] + r[(2, 0)]) / s, (r[(1, 2)] + r[(2, 1)]) / s, 0.25 * s)
    };
    q.normalize()
}

/// Haar-distributed element of SO(4) from the QR factorization of a Gaussian matrix.
pub fn random_rotation4<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    let g = Matrix4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..4 {
        if r[(k, k)] < 0.0 {
            let col = -q.column(k);
            q.set_column(k, &col);
        }
    }
    if q.determinant() < 0.0 {
        let col = -q.column(3);
        q.set_column(3, &col);
    }
    q
}

fn check_orthonormal(e1: &AlgebraElement, e2: &AlgebraElement, tol: f64) -> Result<()> {
    let defect = (e1.norm() - 1.0).abs().max((e2.norm() - 1.0).abs()).max(e1.dot(e2)?.abs());
    if defect > tol {
        return Err(Error::NotOrthonormal(defect));
    }
    Ok(())
}

/// `(ρ, σ) = (e2 ē1, ē1 e2)`; `σ` is only defined for quaternions.
pub fn stiefel_rho_sigma(e1: &AlgebraElement, e2: &AlgebraElement) -> Result<(AlgebraElement, Option<AlgebraElement>)> {
    check_orthonormal(e1, e2, 1e-8)?;
    let rho = e2.mul(&e1.conj())?;
    let sigma = match (e1, e2) {
        (AlgebraElement::Quat(a), AlgebraElement::Quat(b)) => Some(AlgebraElement::Quat(a.conj() * *b)),
        _ => None,
    };
    Ok((rho, sigma))
}

/// Oriented plane `span{e1, e2}` with `e2 ē1 = ρ` and `ē1 e2 = σ`, read off
/// the kernel of `L_ρ - R_σ`.
pub fn plane_from_rho_sigma(rho: Quaternion, sigma: Quaternion) -> Result<(Quaternion, Quaternion)> {
    for x in [rho, sigma] {
        if (x.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::NotUnit(x.norm()));
        }
        if x.w.abs() > 1e-8 {
            return Err(Error::NotImaginary(x.w));
        }
    }
    let op = rho.left_matrix() - sigma.right_matrix();
    let svd = op.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    if sv[1] > 1e-8 || sv[2] < 1e-6 {
        return Err(Error::InconsistentGaussPair(sv));
    }
    let k0 = v_t.row(order[0]).transpose();
    let e1 = Quaternion::from_vector(&nalgebra::Vector4::new(k0[0], k0[1], k0[2], k0[3])).normalize();
    // ρ e1 is again in the kernel and orthogonal to e1.
    let e2 = (rho * e1).normalize();
    Ok((e1, e2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_left_i() {
        let id = rotor_pair_to_matrix(&RotorPair::new(Quaternion::ONE, Quaternion::ONE).unwrap()).unwrap();
        assert_eq!(id, Matrix4::identity());
        let li = rotor_pair_to_matrix(&RotorPair::new(Quaternion::I, Quaternion::ONE).unwrap()).unwrap();
        assert_eq!(li, Quaternion::I.left_matrix());
    }

    #[test]
    fn sign_class_gives_same_matrix() {
        let p = Quaternion::new(0.5, 0.5, -0.5, 0.5);
        let q = Quaternion::new(0.0, 0.6, 0.0, 0.8);
        let a = rotor_pair_to_matrix(&RotorPair { p, q }).unwrap();
        let b = rotor_pair_to_matrix(&RotorPair { p: -p, q: -q }).unwrap();
        assert!((a - b).norm() < 1e-15);
    }

    #[test]
    fn rejects_reflections_and_non_orthogonal() {
        let mut m = Matrix4::identity();
        m[(3, 3)] = -1.0;
        assert!(matches!(matrix_to_rotor_pair(&m), Err(Error::NegativeDeterminant(_))));
        m[(3, 3)] = 2.0;
        assert!(matches!(matrix_to_rotor_pair(&m), Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m = random_rotation4(&mut rng);
            let rp = matrix_to_rotor_pair(&m).unwrap();
            let back = rotor_pair_to_matrix(&rp).unwrap();
            assert!((back - m).abs().max() < 1e-12);
        }
    }

    #[test]
    fn stiefel_examples() {
        let q = |x: Quaternion| AlgebraElement::Quat(x);
        let (rho, sigma) = stiefel_rho_sigma(&q(Quaternion::ONE), &q(Quaternion::J)).unwrap();
        assert_eq!(rho, q(Quaternion::J));
        assert_eq!(sigma, Some(q(Quaternion::J)));
        let (rho, sigma) = stiefel_rho_sigma(&q(Quaternion::ONE), &q(Quaternion::I)).unwrap();
        assert_eq!(rho, q(Quaternion::I));
        assert_eq!(sigma, Some(q(Quaternion::I)));
        let bad = stiefel_rho_sigma(&q(Quaternion::ONE), &q(Quaternion::ONE));
        assert!(matches!(bad, Err(Error::NotOrthonormal(_))));
    }

    #[test]
    fn clifford_frame_angle() {
        // (i e^{ix}, i e^{iy} j) ↦ e^{i(x+y+π)} j
        for &(x, y) in &[(0.3, -1.1), (2.0, 0.7), (-0.4, 3.0)] {
            let ex = Quaternion::exp_axis(Quaternion::I, x);
            let ey = Quaternion::exp_axis(Quaternion::I, y);
            let e1 = Quaternion::I * ex;
            let e2 = Quaternion::I * ey * Quaternion::J;
            let (rho, _) = stiefel_rho_sigma(&AlgebraElement::Quat(e1), &AlgebraElement::Quat(e2)).unwrap();
            let expected = Quaternion::exp_axis(Quaternion::I, x + y + std::f64::consts::PI) * Quaternion::J;
            assert!((rho.as_quaternion().unwrap() - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn plane_examples() {
        let (e1, e2) = plane_from_rho_sigma(Quaternion::J, Quaternion::J).unwrap();
        // span{1, j}
        for e in [e1, e2] {
            assert!(e.x.abs() < 1e-12 && e.z.abs() < 1e-12);
        }
        assert!((e2 * e1.conj() - Quaternion::J).norm() < 1e-12);
        let (e1, _) = plane_from_rho_sigma(Quaternion::I, Quaternion::I).unwrap();
        assert!(e1.y.abs() < 1e-12 && e1.z.abs() < 1e-12);
    }

    #[test]
    fn plane_rejects_inconsistent_pair() {
        // ρ = i, σ = i·(1+1e-3 j) normalised is still a valid pair; a non-unit σ is not.
        assert!(plane_from_rho_sigma(Quaternion::I, Quaternion::I * 2.0).is_err());
    }
}
