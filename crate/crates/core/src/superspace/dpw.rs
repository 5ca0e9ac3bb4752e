//! Holomorphic potentials `μ(D) = μ₀ + θμ_θ` and the ODE
//! `∂_z g₀ = −g₀(μ₀² + μ_θ)`, `g_θ = g₀μ₀` equivalent to `Dg = g μ(D)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::Superspace;
use super::frame::SMat;
use super::grassmann::{Grassmann, Parity};
use crate::error::{Error, Result};

pub type CMat = SMat<Complex64>;

/// `Σ_k λ^k Σ_p z^p M_{k,p}`
#[derive(Debug, Clone)]
pub struct LaurentPolynomial {
    pub terms: Vec<(i32, Vec<CMat>)>,
}

impl LaurentPolynomial {
    pub fn eval(&self, ss: &Superspace<Complex64>, n: usize, z: Complex64, lambda: Complex64) -> CMat {
        let mut out = SMat::zeros(n, ss.g());
        for (k, poly) in &self.terms {
            let lk = lambda.powi(*k);
            let mut zp = Complex64::from(1.0);
            for m in poly {
                out = out.add(&m.scale(lk * zp));
                zp *= z;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Potential {
    pub ss: Superspace<Complex64>,
    pub n: usize,
    /// Odd part `μ₀(D)`.
    pub mu0: LaurentPolynomial,
    /// Even part `μ_θ(D)`.
    pub mu_theta: LaurentPolynomial,
}

fn random_antisymmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&m - m.transpose()) * 0.5
}

fn lift(coef: &Grassmann<Complex64>, m: &DMatrix<f64>) -> CMat {
    SMat::from_fn(m.nrows(), |i, j| coef.scale(Complex64::from(m[(i, j)])))
}

impl Potential {
    /// `μ₀ = λ⁻¹A`, `μ_θ = 0` with constant odd `A`; then
    /// `g₀ = exp(−zλ⁻²A²)` exactly.
    pub fn constant_odd(ss: Superspace<Complex64>, a: CMat) -> Result<Self> {
        a.require(Parity::Odd, "μ₀")?;
        let n = a.n;
        Ok(Self {
            ss,
            n,
            mu0: LaurentPolynomial { terms: vec![(-1, vec![a])] },
            mu_theta: LaurentPolynomial { terms: vec![] },
        })
    }

    /// Seeded potential on `so(n)`: `μ₀ = λ⁻¹(η₁M₁ + η₂M₂) + zη₃M₃`,
    /// `μ_θ = λ⁻¹η₁η₄M₄ + z K` with a body rotation generator `K`.
    pub fn seeded(n: usize, seed: u64) -> Result<Self> {
        let ss = Superspace::new(4, Complex64::from(0.0))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = || random_antisymmetric(&mut rng, n);
        let (m1, m2, m3, m4, k) = (m(), m(), m(), m(), m());
        let e = |a| ss.eta(a);
        let a = lift(&e(1)?, &m1).add(&lift(&e(2)?, &m2));
        let b = lift(&e(3)?, &m3);
        let zero = SMat::zeros(n, ss.g());
        let c = lift(&e(1)?.mul(&e(4)?), &m4);
        let body = lift(&ss.one(), &k);
        Ok(Self {
            mu0: LaurentPolynomial { terms: vec![(-1, vec![a]), (0, vec![zero.clone(), b])] },
            mu_theta: LaurentPolynomial { terms: vec![(-1, vec![c]), (0, vec![zero, body])] },
            ss,
            n,
        })
    }

    pub fn mu0_at(&self, z: Complex64, lambda: Complex64) -> CMat {
        self.mu0.eval(&self.ss, self.n, z, lambda)
    }

    pub fn mu_theta_at(&self, z: Complex64, lambda: Complex64) -> CMat {
        self.mu_theta.eval(&self.ss, self.n, z, lambda)
    }

    /// `−(μ₀² + μ_θ)`
    pub fn generator(&self, z: Complex64, lambda: Complex64) -> CMat {
        let m0 = self.mu0_at(z, lambda);
        m0.mul(&m0).add(&self.mu_theta_at(z, lambda)).scale(Complex64::from(-1.0))
    }
}

/// Classical RK4 for `g₀` along the segment `z0 → z1`, starting at the
/// identity. Returns the values at all `steps + 1` nodes.
pub fn integrate(pot: &Potential, lambda: Complex64, z0: Complex64, z1: Complex64, steps: usize) -> Result<Vec<CMat>> {
    if lambda.norm() == 0.0 {
        return Err(Error::ZeroLambda);
    }
    let dz = (z1 - z0) / steps as f64;
    let f = |g: &CMat, z: Complex64| g.mul(&pot.generator(z, lambda)).scale(dz);
    let mut g = SMat::identity(&pot.ss, pot.n);
    let mut out = vec![g.clone()];
    for s in 0..steps {
        let z = z0 + dz * s as f64;
        let half = dz * 0.5;
        let k1 = f(&g, z);
        let k2 = f(&g.add(&k1.scale(Complex64::from(0.5))), z + half);
        let k3 = f(&g.add(&k2.scale(Complex64::from(0.5))), z + half);
        let k4 = f(&g.add(&k3), z + dz);
        let inc = k1.add(&k2.scale(Complex64::from(2.0))).add(&k3.scale(Complex64::from(2.0))).add(&k4);
        g = g.add(&inc.scale(Complex64::from(1.0 / 6.0)));
        if !g.max_abs().is_finite() {
            return Err(Error::NonFiniteStep(s + 1));
        }
        out.push(g.clone());
    }
    Ok(out)
}

/// Inverse of a matrix whose body is invertible.
pub fn inverse(ss: &Superspace<Complex64>, m: &CMat) -> Result<CMat> {
    let n = m.n;
    let body = DMatrix::from_fn(n, n, |i, j| m.at(i, j).body().copied().unwrap_or_default());
    let binv = body.try_inverse().ok_or(Error::NotInvertible)?;
    let binv = SMat::from_fn(n, |i, j| ss.constant(binv[(i, j)]));
    let nil = SMat::from_fn(n, |i, j| m.at(i, j).restrict(|mask| mask != 0));
    let step = binv.mul(&nil).scale(Complex64::from(-1.0));
    let mut term = binv.clone();
    let mut out = binv;
    for _ in 0..ss.g() {
        term = step.mul(&term);
        if term.max_abs() == 0.0 {
            break;
        }
        out = out.add(&term);
    }
    Ok(out)
}

pub fn exp_nilpotent(ss: &Superspace<Complex64>, m: &CMat) -> Result<CMat> {
    m.require(Parity::Even, "exponent")?;
    let mut term = SMat::identity(ss, m.n);
    let mut out = term.clone();
    for k in 1..=ss.g() {
        term = term.mul(m).scale(Complex64::from(1.0 / k as f64));
        if term.max_abs() == 0.0 {
            return Ok(out);
        }
        out = out.add(&term);
    }
    Err(Error::Parity("exponent is not nilpotent".into()))
}

#[derive(Debug, Clone)]
pub struct DpwReport {
    /// Sup over interior nodes of the θ-component of `Dg − gμ(D)`, with
    /// `∂_z g₀` from central differences along the path.
    pub ode_residual: f64,
    pub endpoint: CMat,
}

pub fn solve(pot: &Potential, lambda: Complex64, z0: Complex64, z1: Complex64, steps: usize) -> Result<DpwReport> {
    let path = integrate(pot, lambda, z0, z1, steps)?;
    let dz = (z1 - z0) / steps as f64;
    let mut ode: f64 = 0.0;
    for s in 1..steps {
        let z = z0 + dz * s as f64;
        let g0 = &path[s];
        let mu0 = pot.mu0_at(z, lambda);
        // the θ⁰-component fixes g_θ
        let gtheta = g0.mul(&mu0);
        let dg = path[s + 1].sub(&path[s - 1]).scale((dz * 2.0).inv());
        // θ-part of Dg − gμ: −∂_z g₀ − (g₀μ_θ + g_θμ₀)
        let r = dg.add(&g0.mul(&pot.mu_theta_at(z, lambda))).add(&gtheta.mul(&mu0));
        ode = ode.max(r.max_abs());
    }
    Ok(DpwReport { ode_residual: ode, endpoint: path[steps].clone() })
}

/// Laurent coefficients (degrees `−m/2 .. m/2`) of `g₀⁻¹∂_z g₀` at the
/// midpoint of the path, from `m` samples of λ on the unit circle.
pub fn maurer_cartan_laurent(
    pot: &Potential,
    z0: Complex64,
    z1: Complex64,
    steps: usize,
    samples: usize,
) -> Result<Vec<(i32, f64)>> {
    let mid = steps / 2;
    let dz = (z1 - z0) / steps as f64;
    let mut values = Vec::with_capacity(samples);
    for s in 0..samples {
        let lambda = Complex64::from_polar(1.0, std::f64::consts::TAU * s as f64 / samples as f64);
        let path = integrate(pot, lambda, z0, z1, steps)?;
        let dg = path[mid + 1].sub(&path[mid - 1]).scale((dz * 2.0).inv());
        values.push((lambda, inverse(&pot.ss, &path[mid])?.mul(&dg)));
    }
    let half = (samples / 2) as i32;
    Ok((-half..half)
        .map(|k| {
            let mut acc = SMat::zeros(pot.n, pot.ss.g());
            for (l, v) in &values {
                acc = acc.add(&v.scale(l.powi(-k) / samples as f64));
            }
            (k, acc.max_abs())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_unipotent_matrix() {
        let pot = Potential::seeded(3, 7).unwrap();
        let g = integrate(&pot, Complex64::new(0.3, 0.9), Complex64::from(0.0), Complex64::new(0.4, 0.2), 20).unwrap();
        let last = g.last().unwrap();
        let inv = inverse(&pot.ss, last).unwrap();
        assert!(inv.mul(last).sub(&SMat::identity(&pot.ss, 3)).max_abs() < 1e-13);
    }
}
