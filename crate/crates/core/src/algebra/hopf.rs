use rand::Rng;
use rand_distr::StandardNormal;

use super::{AlgebraContext, Matrix8, Octonion, Quaternion, UNIT_TOL};
use crate::error::{Error, Result};

/// Left Hopf map `p ↦ p u p̄` (restriction of `L_p R_q̄ ↦ p u p̄` to `q = 1`).
pub fn hopf_left(p: Quaternion, ctx: &AlgebraContext) -> Result<Quaternion> {
    if (p.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(p.norm()));
    }
    let u = ctx.u_quaternion();
    Ok(p * u * p.conj())
}

fn check_unit_imaginary(v: Quaternion) -> Result<()> {
    if (v.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::NotUnit(v.norm()));
    }
    if v.w.abs() > 1e-8 {
        return Err(Error::NotImaginary(v.w));
    }
    Ok(())
}

/// Minimal-rotation unit quaternion `p` with `p u p̄ = ρ`.
pub fn rotor_to(u: Quaternion, rho: Quaternion) -> Result<Quaternion> {
    check_unit_imaginary(u)?;
    check_unit_imaginary(rho)?;
    // 1 - ρu = 1 + ⟨u,ρ⟩ + u×ρ, the half-angle rotor about u×ρ.
    let p = Quaternion::ONE - rho * u;
    if p.norm() < 1e-8 {
        return Err(Error::Antipodal);
    }
    Ok(p.normalize())
}

/// Point of the fiber `{p : p u p̄ = ρ}` closest to `hint`.
///
/// The fiber is `p₀ e^{uθ}`; maximizing `⟨hint, p₀ e^{uθ}⟩` over θ is a
/// two-term trigonometric maximisation. Near the antipode `ρ ≈ −u` the base
/// point is `r w` with `w ⟂ u` (so `w u w̄ = −u`) and `r` rotating `−u` to `ρ`,
/// which keeps `p₀` well conditioned.
pub fn fiber_point_near(u: Quaternion, rho: Quaternion, hint: Quaternion) -> Result<Quaternion> {
    check_unit_imaginary(u)?;
    check_unit_imaginary(rho)?;
    let p0 = if u.dot(rho) > -0.5 {
        rotor_to(u, rho)?
    } else {
        let trial = if u.x.abs() < 0.9 { Quaternion::I } else { Quaternion::J };
        let w = (trial - u * trial.dot(u)).normalize();
        rotor_to(-u, rho)? * w
    };
    // ⟨h, p0 (cos θ + sin θ u)⟩ = a cos θ + b sin θ
    let a = hint.dot(p0);
    let b = hint.dot(p0 * u);
    let theta = b.atan2(a);
    Ok((p0 * Quaternion::exp_axis(u, theta)).normalize())
}

/// Element of Spin(7) ⊂ SO(8) stored as a matrix together with the unit
/// imaginary octonions whose left multiplications produce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Spin7Element {
    pub matrix: Matrix8,
    pub factors: Vec<Octonion>,
}

impl Spin7Element {
    pub fn identity() -> Self {
        Self { matrix: Matrix8::identity(), factors: Vec::new() }
    }

    /// `L_{v1} ··· L_{vr}` for unit imaginary `v_k`.
    pub fn from_generators(factors: &[Octonion]) -> Result<Self> {
        let mut m = Matrix8::identity();
        for v in factors {
            if (v.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::NotUnit(v.norm()));
            }
            if v.real().abs() > 1e-8 {
                return Err(Error::NotImaginary(v.real()));
            }
            m *= v.left_matrix();
        }
        Ok(Self { matrix: m, factors: factors.to_vec() })
    }

    /// Product of `r` random generators drawn uniformly from S⁶.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, r: usize) -> Self {
        let factors: Vec<Octonion> = (0..r)
            .map(|_| {
                let mut c = [0.0; 8];
                for v in c.iter_mut().skip(1) {
                    *v = rng.sample(StandardNormal);
                }
                Octonion(c).normalize()
            })
            .collect();
        Self::from_generators(&factors).expect("generators are unit imaginary")
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self { matrix: self.matrix * other.matrix, factors }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        (self.matrix.transpose() * self.matrix - Matrix8::identity()).abs().max()
    }
}

/// `w` with `p L_u p⁻¹ = L_w`, together with the full-matrix residual.
pub fn spin7_hopf_from_matrix(p: &Matrix8, u: Octonion) -> Result<(Octonion, f64)> {
    let ortho = (p.transpose() * p - Matrix8::identity()).abs().max();
    if ortho > 1e-10 {
        return Err(Error::NotOrthogonal(ortho));
    }
    let conj = p * u.left_matrix() * p.transpose();
    // L_w(1) = w
    let w = Octonion::from_vector(&conj.column(0).into_owned());
    let residual = (conj - w.left_matrix()).abs().max();
    if residual > 1e-10 {
        return Err(Error::NotInSpin7(residual));
    }
    Ok((w, residual))
}

pub fn spin7_hopf(p: &Spin7Element, ctx: &AlgebraContext) -> Result<Octonion> {
    spin7_hopf_from_matrix(&p.matrix, ctx.u_octonion()).map(|(w, _)| w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn hopf_examples() {
        let ctx = AlgebraContext::quaternionic();
        assert_eq!(hopf_left(Quaternion::ONE, &ctx).unwrap(), Quaternion::J);
        let p = Quaternion::exp_axis(Quaternion::I, FRAC_PI_4);
        assert!((hopf_left(p, &ctx).unwrap() - Quaternion::K).norm() < 1e-15);
        for theta in [0.1, 1.3, -2.7] {
            let q = p * Quaternion::exp_axis(Quaternion::J, theta);
            assert!((hopf_left(q, &ctx).unwrap() - hopf_left(p, &ctx).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn rotor_to_examples() {
        assert_eq!(rotor_to(Quaternion::J, Quaternion::J).unwrap(), Quaternion::ONE);
        let p = rotor_to(Quaternion::J, Quaternion::K).unwrap();
        assert!((p * Quaternion::J * p.conj() - Quaternion::K).norm() < 1e-14);
        assert!((p - Quaternion::exp_axis(Quaternion::I, FRAC_PI_4)).norm() < 1e-15);
        assert_eq!(rotor_to(Quaternion::J, -Quaternion::J), Err(Error::Antipodal));
    }

    #[test]
    fn fiber_point_handles_antipode() {
        let u = Quaternion::J;
        let hint = Quaternion::exp_axis(Quaternion::I, 1.5);
        let p = fiber_point_near(u, -u, hint).unwrap();
        assert!((p * u * p.conj() + u).norm() < 1e-14);
        // nearest fiber point to a point already on the fiber is itself
        let rho = Quaternion::exp_axis(Quaternion::I, 0.8) * Quaternion::J;
        let p0 = rotor_to(u, rho).unwrap() * Quaternion::exp_axis(u, 0.4);
        assert!((fiber_point_near(u, rho, p0).unwrap() - p0).norm() < 1e-14);
    }

    #[test]
    fn spin7_examples() {
        let ctx = AlgebraContext::octonionic();
        let u = ctx.u_octonion();
        assert_eq!(spin7_hopf(&Spin7Element::identity(), &ctx).unwrap(), u);
        let lu = Spin7Element::from_generators(&[u]).unwrap();
        assert!((spin7_hopf(&lu, &ctx).unwrap() - u).norm() < 1e-15);
        let le2 = Spin7Element::from_generators(&[Octonion::basis(2)]).unwrap();
        assert_eq!(spin7_hopf(&le2, &ctx).unwrap(), -Octonion::basis(1));
    }

    #[test]
    fn non_spin7_rejected() {
        // a coordinate swap is orthogonal but does not normalise the L-image
        let mut m = Matrix8::identity();
        m.swap_columns(1, 4);
        let r = spin7_hopf_from_matrix(&m, Octonion::basis(1));
        assert!(matches!(r, Err(Error::NotInSpin7(_))));
    }
}
