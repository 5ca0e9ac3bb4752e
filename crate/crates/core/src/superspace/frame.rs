//! Matrices over the Grassmann algebra, the Householder super frame of a
//! superfield, its Maurer–Cartan form and the associated λ-family.

use num_complex::Complex64;

use super::coeff::Coefficient;
use super::field::{inner, op_d, op_dbar, SVec, Superspace};
use super::grassmann::{Grassmann, Parity};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SMat<C> {
    pub n: usize,
    pub entries: Vec<Grassmann<C>>,
}

impl<C: Coefficient> SMat<C> {
    pub fn zeros(n: usize, g: usize) -> Self {
        Self { n, entries: vec![Grassmann::zero(g); n * n] }
    }

    pub fn identity(ss: &Superspace<C>, n: usize) -> Self {
        let mut m = Self::zeros(n, ss.g());
        for k in 0..n {
            m.entries[k * n + k] = ss.one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Grassmann<C>) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, entries }
    }

    pub fn at(&self, i: usize, j: usize) -> &Grassmann<C> {
        &self.entries[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> SVec<C> {
        (0..self.n).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(i, j).add(o.at(i, j)))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(i, j).sub(o.at(i, j)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.n, |i, j| self.at(i, j).scale(s))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| {
            (0..n).fold(Grassmann::zero(self.at(0, 0).generators()), |acc, k| acc.add(&self.at(i, k).mul(o.at(k, j))))
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(j, i).clone())
    }

    pub fn map(&self, f: impl Fn(&Grassmann<C>) -> Result<Grassmann<C>>) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, entries })
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut out = Some(Parity::Even);
        let mut seen = false;
        for e in self.entries.iter().filter(|e| !e.is_zero()) {
            let p = e.parity();
            if !seen {
                out = p;
                seen = true;
            } else if p != out {
                return None;
            }
        }
        out
    }

    pub fn require(&self, p: Parity, what: &str) -> Result<()> {
        for e in &self.entries {
            e.require(p, what)?;
        }
        Ok(())
    }

    /// `AB − (−1)^{|A||B|} BA` for homogeneous `A`, `B`.
    pub fn graded_bracket(&self, o: &Self, both_odd: bool) -> Self {
        let ab = self.mul(o);
        let ba = o.mul(self);
        if both_odd {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
    }

    /// Splits `A = A₀ + A₁` into the parts commuting and anticommuting with
    /// the reflection in the axis `b`.
    pub fn split(&self, b: usize) -> (Self, Self) {
        let even = |i: usize, j: usize| (i == b) == (j == b);
        let zero = Grassmann::zero(self.at(0, 0).generators());
        let a0 = Self::from_fn(self.n, |i, j| if even(i, j) { self.at(i, j).clone() } else { zero.clone() });
        let a1 = Self::from_fn(self.n, |i, j| if even(i, j) { zero.clone() } else { self.at(i, j).clone() });
        (a0, a1)
    }
}

/// `ℱ = H S`: `H` is the Householder reflection exchanging `e_b` and `Φ`,
/// `S` flips the axis after `b` so that the frame is special orthogonal.
/// Requires `1 − Φ_b` to be invertible; pick `b` away from the body of `Φ`.
pub fn super_frame<C: Coefficient>(ss: &Superspace<C>, phi: &SVec<C>, b: usize) -> Result<SMat<C>> {
    let n = phi.len();
    if b >= n || n < 2 {
        return Err(Error::DimensionMismatch(format!("axis {b} for a frame of size {n}")));
    }
    let mut w: SVec<C> = phi.iter().map(|x| x.scale(Complex64::from(-1.0))).collect();
    w[b] = ss.one().add(&w[b]);
    let ww = inner(&w, &w).recip()?;
    let h = SMat::from_fn(n, |i, j| {
        let delta = if i == j { ss.one() } else { ss.zero() };
        delta.sub(&w[i].mul(&w[j]).mul(&ww).scale(Complex64::from(2.0)))
    });
    let s = (b + 1) % n;
    let flip = SMat::from_fn(n, |i, j| match (i == j, i == s) {
        (true, true) => ss.one().scale(Complex64::from(-1.0)),
        (true, false) => ss.one(),
        _ => ss.zero(),
    });
    Ok(h.mul(&flip))
}

/// Values of a Lie-algebra valued superform on the frame `D, D̄, ∂_z, ∂_z̄`.
#[derive(Debug, Clone)]
pub struct SuperConnection<C> {
    pub d: SMat<C>,
    pub dbar: SMat<C>,
    pub dz: SMat<C>,
    pub dzbar: SMat<C>,
}

impl<C: Coefficient> SuperConnection<C> {
    /// `α = ℱ⁻¹dℱ` with `ℱ⁻¹ = ℱᵀ`.
    pub fn from_frame(frame: &SMat<C>) -> Result<Self> {
        let ft = frame.transpose();
        let c = Self {
            d: ft.mul(&frame.map(op_d)?),
            dbar: ft.mul(&frame.map(op_dbar)?),
            dz: ft.mul(&frame.map(|e| e.d_dz())?),
            dzbar: ft.mul(&frame.map(|e| e.d_dzbar())?),
        };
        c.check()?;
        Ok(c)
    }

    /// Completes `α(D)`, `α(D̄)` by the `(D,D)` and `(D̄,D̄)` constraints
    /// `α(∂_z) = −Dα(D) − α(D)²` and its conjugate.
    pub fn from_odd(d: SMat<C>, dbar: SMat<C>) -> Result<Self> {
        let dz = d.map(op_d)?.add(&d.mul(&d)).scale(Complex64::from(-1.0));
        let dzbar = dbar.map(op_dbar)?.add(&dbar.mul(&dbar)).scale(Complex64::from(-1.0));
        let c = Self { d, dbar, dz, dzbar };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        self.d.require(Parity::Odd, "α(D)")?;
        self.dbar.require(Parity::Odd, "α(D̄)")?;
        self.dz.require(Parity::Even, "α(∂z)")?;
        self.dzbar.require(Parity::Even, "α(∂z̄)")
    }

    /// `α_λ(D) = α₀(D) + λ⁻¹α₁(D)`, `α_λ(D̄) = α₀(D̄) + λα₁(D̄)`, completed by
    /// the constraints.
    pub fn lambda_family(&self, b: usize, lambda: Complex64) -> Result<Self> {
        if lambda.norm() == 0.0 {
            return Err(Error::ZeroLambda);
        }
        let (d0, d1) = self.d.split(b);
        let (b0, b1) = self.dbar.split(b);
        Self::from_odd(d0.add(&d1.scale(lambda.inv())), b0.add(&b1.scale(lambda)))
    }

    /// `D̄α₁(D) + [α₀(D̄), α₁(D)]`
    pub fn superharmonic_expression(&self, b: usize) -> Result<SMat<C>> {
        let (_, d1) = self.d.split(b);
        let (b0, _) = self.dbar.split(b);
        Ok(d1.map(op_dbar)?.add(&b0.graded_bracket(&d1, true)))
    }
}

/// `Ω(U,V) = Uα(V) − (−1)^{|U||V|}Vα(U) − α([U,V]) + [α(U), α(V)]`.
#[derive(Debug, Clone)]
pub struct SuperCurvature<C> {
    /// `(D,D̄)` first, then `(D,∂z)`, `(D,∂z̄)`, `(D̄,∂z)`, `(D̄,∂z̄)`, `(∂z,∂z̄)`.
    pub components: Vec<(&'static str, SMat<C>)>,
    /// `(D,D)` and `(D̄,D̄)`, which define `α(∂z)` and `α(∂z̄)` in terms of the
    /// odd part.
    pub constraints: Vec<(&'static str, SMat<C>)>,
}

impl<C: Coefficient> SuperCurvature<C> {
    pub fn sups(&self) -> Vec<(&'static str, f64)> {
        self.components.iter().chain(&self.constraints).map(|(n, m)| (*n, m.max_abs())).collect()
    }

    pub fn sup(&self) -> f64 {
        self.sups().iter().map(|(_, v)| *v).fold(0.0, f64::max)
    }
}

fn even_odd_component<C: Coefficient>(
    even_op: impl Fn(&Grassmann<C>) -> Result<Grassmann<C>>,
    odd_op: impl Fn(&Grassmann<C>) -> Result<Grassmann<C>>,
    a_odd: &SMat<C>,
    a_even: &SMat<C>,
) -> Result<SMat<C>> {
    // Ω(O,E) = Oα(E) − Eα(O) + α(O)α(E) − α(E)α(O)
    Ok(a_even.map(odd_op)?.sub(&a_odd.map(even_op)?).add(&a_odd.graded_bracket(a_even, false)))
}

pub fn super_curvature<C: Coefficient>(a: &SuperConnection<C>) -> Result<SuperCurvature<C>> {
    a.check()?;
    let dz = |e: &Grassmann<C>| e.d_dz();
    let dzb = |e: &Grassmann<C>| e.d_dzbar();
    let two = Complex64::from(2.0);
    let dd = a.d.map(op_d)?.add(&a.dz).add(&a.d.mul(&a.d)).scale(two);
    let bb = a.dbar.map(op_dbar)?.add(&a.dzbar).add(&a.dbar.mul(&a.dbar)).scale(two);
    let db = a.dbar.map(op_d)?.add(&a.d.map(op_dbar)?).add(&a.d.graded_bracket(&a.dbar, true));
    let zz = a.dzbar.map(dz)?.sub(&a.dz.map(dzb)?).add(&a.dz.graded_bracket(&a.dzbar, false));
    Ok(SuperCurvature {
        components: vec![
            ("D,Dbar", db),
            ("D,dz", even_odd_component(dz, op_d, &a.d, &a.dz)?),
            ("D,dzbar", even_odd_component(dzb, op_d, &a.d, &a.dzbar)?),
            ("Dbar,dz", even_odd_component(dz, op_dbar, &a.dbar, &a.dz)?),
            ("Dbar,dzbar", even_odd_component(dzb, op_dbar, &a.dbar, &a.dzbar)?),
            ("dz,dzbar", zz),
        ],
        constraints: vec![("D,D", dd), ("Dbar,Dbar", bb)],
    })
}

/// Laurent coefficients of `λ ↦ Ω_λ(D,D̄)` in degrees `−1, 0, 1`, read off
/// from the four fourth roots of unity.
pub fn lambda_laurent<C: Coefficient>(a: &SuperConnection<C>, b: usize) -> Result<[SMat<C>; 3]> {
    let roots: Vec<Complex64> = (0..4).map(|m| Complex64::i().powu(m)).collect();
    let samples = roots
        .iter()
        .map(|l| {
            let fam = a.lambda_family(b, *l)?;
            Ok(super_curvature(&fam)?.components.swap_remove(0).1)
        })
        .collect::<Result<Vec<_>>>()?;
    let coeff = |k: i32| {
        let mut acc = samples[0].scale(Complex64::from(0.0));
        for (l, s) in roots.iter().zip(&samples) {
            acc = acc.add(&s.scale(l.powi(-k) * 0.25));
        }
        acc
    };
    Ok([coeff(-1), coeff(0), coeff(1)])
}

/// Orthogonality defect `|ℱᵀℱ − I|`.
pub fn orthogonality_defect<C: Coefficient>(ss: &Superspace<C>, f: &SMat<C>) -> f64 {
    f.transpose().mul(f).sub(&SMat::identity(ss, f.n)).max_abs()
}

#[cfg(test)]
mod tests {
    use super::super::coeff::Jet;
    use super::super::examples::SuperExample;
    use super::*;

    #[test]
    fn frame_lifts_the_superfield() {
        let ss = Superspace::new(2, Jet::constant_of(6, Complex64::from(0.0)).at((0.3, 0.1))).unwrap();
        let sf = SuperExample::Superharmonic.build(&ss).unwrap();
        let phi = sf.assemble(&ss).unwrap();
        let f = super_frame(&ss, &phi, 2).unwrap();
        assert!(orthogonality_defect(&ss, &f) < 1e-13);
        let col = f.column(2);
        for (a, b) in col.iter().zip(&phi) {
            assert!(a.max_diff(b) < 1e-13);
        }
        assert!(matches!(super_frame(&ss, &phi, 3), Err(Error::DimensionMismatch(_))));
    }
}
