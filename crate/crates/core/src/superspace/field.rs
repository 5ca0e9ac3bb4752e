//! Superfields on `R^{2|2}` with `θ = θ¹ + iθ²`, the odd operators
//! `D = ∂_θ − θ∂_z`, `D̄ = ∂_θ̄ − θ̄∂_z̄`, and the superharmonic residuals.

use num_complex::Complex64;

use super::coeff::Coefficient;
use super::grassmann::{Grassmann, Parity};
use crate::error::{Error, Result};

pub const THETA1: usize = 0;
pub const THETA2: usize = 1;
const THETA_BITS: u32 = 0b11;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Generator layout `θ¹, θ², η_1, …, η_N` together with a coefficient
/// template fixing the shape (grid, jet order) of constants.
#[derive(Debug, Clone)]
pub struct Superspace<C> {
    pub n_eta: usize,
    pub template: C,
}

pub type SVec<C> = Vec<Grassmann<C>>;

impl<C: Coefficient> Superspace<C> {
    pub fn new(n_eta: usize, template: C) -> Result<Self> {
        if n_eta + 2 > 31 {
            return Err(Error::GeneratorBudget { index: n_eta + 1, budget: 31 });
        }
        Ok(Self { n_eta, template })
    }

    pub fn g(&self) -> usize {
        self.n_eta + 2
    }

    pub fn zero(&self) -> Grassmann<C> {
        Grassmann::zero(self.g())
    }

    pub fn one(&self) -> Grassmann<C> {
        self.constant(c(1.0, 0.0))
    }

    pub fn constant(&self, v: Complex64) -> Grassmann<C> {
        Grassmann::scalar(self.g(), self.template.constant(v))
    }

    pub fn scalar(&self, f: C) -> Grassmann<C> {
        Grassmann::scalar(self.g(), f)
    }

    /// `η_a`, `a = 1..=N`.
    pub fn eta(&self, a: usize) -> Result<Grassmann<C>> {
        if a == 0 || a > self.n_eta {
            return Err(Error::GeneratorBudget { index: a, budget: self.n_eta });
        }
        Grassmann::generator(self.g(), a + 1, &self.template)
    }

    pub fn theta(&self) -> Grassmann<C> {
        let t1 = Grassmann::generator(self.g(), THETA1, &self.template).expect("θ¹ exists");
        let t2 = Grassmann::generator(self.g(), THETA2, &self.template).expect("θ² exists");
        t1.add(&t2.scale(Complex64::i()))
    }

    pub fn thetabar(&self) -> Grassmann<C> {
        self.theta().conj()
    }

    pub fn zero_vec(&self, n: usize) -> SVec<C> {
        vec![self.zero(); n]
    }

    /// Even body-only vector from coefficient functions.
    pub fn body_vec(&self, v: Vec<C>) -> SVec<C> {
        v.into_iter().map(|f| self.scalar(f)).collect()
    }
}

pub fn d_theta<C: Coefficient>(x: &Grassmann<C>) -> Grassmann<C> {
    x.d_gen(THETA1).sub(&x.d_gen(THETA2).scale(Complex64::i())).scale(c(0.5, 0.0))
}

pub fn d_thetabar<C: Coefficient>(x: &Grassmann<C>) -> Grassmann<C> {
    x.d_gen(THETA1).add(&x.d_gen(THETA2).scale(Complex64::i())).scale(c(0.5, 0.0))
}

/// `θ` (or `θ̄`) shaped like the coefficients of a nonzero `x`.
fn theta_of<C: Coefficient>(x: &Grassmann<C>, bar: bool) -> Grassmann<C> {
    let g = x.generators();
    let (_, f) = x.terms().next().expect("nonzero element");
    let s = if bar { -1.0 } else { 1.0 };
    let t1 = Grassmann::term(g, 1 << THETA1, f.constant(c(1.0, 0.0))).expect("θ¹ exists");
    let t2 = Grassmann::term(g, 1 << THETA2, f.constant(c(0.0, s))).expect("θ² exists");
    t1.add(&t2)
}

/// `D x = ∂_θ x − θ ∂_z x`
pub fn op_d<C: Coefficient>(x: &Grassmann<C>) -> Result<Grassmann<C>> {
    if x.is_zero() {
        return Ok(x.clone());
    }
    let th = theta_of(x, false);
    Ok(d_theta(x).sub(&th.mul(&x.d_dz()?)))
}

/// `D̄ x = ∂_θ̄ x − θ̄ ∂_z̄ x`
pub fn op_dbar<C: Coefficient>(x: &Grassmann<C>) -> Result<Grassmann<C>> {
    if x.is_zero() {
        return Ok(x.clone());
    }
    let th = theta_of(x, true);
    Ok(d_thetabar(x).sub(&th.mul(&x.d_dzbar()?)))
}

pub fn vadd<C: Coefficient>(a: &SVec<C>, b: &SVec<C>) -> SVec<C> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vsub<C: Coefficient>(a: &SVec<C>, b: &SVec<C>) -> SVec<C> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vscale<C: Coefficient>(a: &SVec<C>, s: Complex64) -> SVec<C> {
    a.iter().map(|x| x.scale(s)).collect()
}

/// `s v`
pub fn vleft<C: Coefficient>(s: &Grassmann<C>, v: &SVec<C>) -> SVec<C> {
    v.iter().map(|x| s.mul(x)).collect()
}

/// `v s`
pub fn vright<C: Coefficient>(v: &SVec<C>, s: &Grassmann<C>) -> SVec<C> {
    v.iter().map(|x| x.mul(s)).collect()
}

/// Bilinear `⟨a, b⟩ = Σ a_k b_k`, factor order preserved.
pub fn inner<C: Coefficient>(a: &SVec<C>, b: &SVec<C>) -> Grassmann<C> {
    let g = a.first().map(|x| x.generators()).unwrap_or(0);
    a.iter().zip(b).fold(Grassmann::zero(g), |acc, (x, y)| acc.add(&x.mul(y)))
}

pub fn vmap<C: Coefficient>(v: &SVec<C>, f: impl Fn(&Grassmann<C>) -> Result<Grassmann<C>>) -> Result<SVec<C>> {
    v.iter().map(f).collect()
}

pub fn vconj<C: Coefficient>(v: &SVec<C>) -> SVec<C> {
    v.iter().map(|x| x.conj()).collect()
}

pub fn vmax_abs<C: Coefficient>(v: &SVec<C>) -> f64 {
    v.iter().map(|x| x.max_abs()).fold(0.0, f64::max)
}

pub fn vmax_diff<C: Coefficient>(a: &SVec<C>, b: &SVec<C>) -> f64 {
    vmax_abs(&vsub(a, b))
}

/// `Φ = u + θ¹ψ₁ + θ²ψ₂ + θ¹θ² F` with `u` sphere valued and `ψ_i` odd and
/// tangent along `u`.
#[derive(Debug, Clone)]
pub struct SuperField<C> {
    pub u: SVec<C>,
    pub psi1: SVec<C>,
    pub psi2: SVec<C>,
    pub aux: SVec<C>,
}

/// Sign in front of the `ψ̄⟨ψ̄, u_z⟩` term of the map equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapSign {
    Plus,
    Minus,
}

/// Component residuals. `r_spinor_bar` is the conjugate equation, computed
/// independently.
#[derive(Debug, Clone)]
pub struct ComponentResiduals<C> {
    pub r_map: SVec<C>,
    pub r_spinor: SVec<C>,
    pub r_spinor_bar: SVec<C>,
    pub r_aux: SVec<C>,
}

impl<C: Coefficient> ComponentResiduals<C> {
    pub fn sup(&self) -> f64 {
        vmax_abs(&self.r_map).max(vmax_abs(&self.r_spinor)).max(vmax_abs(&self.r_aux))
    }
}

/// `E = E₀ + θ E_θ + θ̄ E_θ̄ + θθ̄ E_θθ̄` with θ-free parts.
#[derive(Debug, Clone)]
pub struct ThetaParts<C> {
    pub e0: SVec<C>,
    pub theta: SVec<C>,
    pub thetabar: SVec<C>,
    pub theta_thetabar: SVec<C>,
}

pub fn theta_parts<C: Coefficient>(e: &SVec<C>) -> ThetaParts<C> {
    let free = |v: &Grassmann<C>| v.restrict(|m| m & THETA_BITS == 0);
    ThetaParts {
        e0: e.iter().map(free).collect(),
        theta: e.iter().map(|x| free(&d_theta(x))).collect(),
        thetabar: e.iter().map(|x| free(&d_thetabar(x))).collect(),
        theta_thetabar: e.iter().map(|x| free(&d_thetabar(&d_theta(x)))).collect(),
    }
}

/// Tolerance for the sphere and tangency preconditions.
pub const PRECONDITION_TOL: f64 = 1e-8;

impl<C: Coefficient> SuperField<C> {
    /// Builds the superfield from the complex spinor `ψ = ψ₁ − iψ₂`, with the
    /// auxiliary field fixed by `F = (1/2i)⟨ψ, ψ̄⟩ u`.
    pub fn from_spinor(ss: &Superspace<C>, u: SVec<C>, psi: SVec<C>) -> Result<Self> {
        let psibar = vconj(&psi);
        let psi1 = vscale(&vadd(&psi, &psibar), c(0.5, 0.0));
        let psi2 = vscale(&vsub(&psibar, &psi), c(0.0, -0.5));
        let mut sf = Self { aux: ss.zero_vec(u.len()), u, psi1, psi2 };
        sf.aux = sf.aux_from_spinor();
        sf.validate()?;
        Ok(sf)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn psi(&self) -> SVec<C> {
        vsub(&self.psi1, &vscale(&self.psi2, Complex64::i()))
    }

    pub fn psibar(&self) -> SVec<C> {
        vadd(&self.psi1, &vscale(&self.psi2, Complex64::i()))
    }

    /// `(1/2i)⟨ψ, ψ̄⟩ u`
    pub fn aux_from_spinor(&self) -> SVec<C> {
        let pp = inner(&self.psi(), &self.psibar()).scale(c(0.0, -0.5));
        vleft(&pp, &self.u)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if [&self.psi1, &self.psi2, &self.aux].iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch("superfield components differ in length".into()));
        }
        for x in &self.u {
            x.require(Parity::Even, "u")?;
            if x.terms().any(|(m, _)| m & THETA_BITS != 0) {
                return Err(Error::Parity("u depends on θ".into()));
            }
        }
        for x in self.psi1.iter().chain(&self.psi2) {
            x.require(Parity::Odd, "ψ")?;
        }
        for x in &self.aux {
            x.require(Parity::Even, "F")?;
        }
        let uu = inner(&self.u, &self.u);
        let one = Grassmann::scalar(
            uu.generators(),
            self.u[0].terms().next().map(|(_, f)| f.constant(c(1.0, 0.0))).ok_or(Error::OffSphere(1.0))?,
        );
        let dev = uu.max_diff(&one);
        if dev > PRECONDITION_TOL {
            return Err(Error::OffSphere(dev));
        }
        let tang = inner(&self.psi1, &self.u).max_abs().max(inner(&self.psi2, &self.u).max_abs());
        if tang > PRECONDITION_TOL {
            return Err(Error::NotTangent(tang));
        }
        Ok(())
    }

    pub fn assemble(&self, ss: &Superspace<C>) -> Result<SVec<C>> {
        let t1 = Grassmann::generator(ss.g(), THETA1, &ss.template)?;
        let t2 = Grassmann::generator(ss.g(), THETA2, &ss.template)?;
        let t12 = t1.mul(&t2);
        let v = vadd(&self.u, &vleft(&t1, &self.psi1));
        let v = vadd(&v, &vleft(&t2, &self.psi2));
        Ok(vadd(&v, &vleft(&t12, &self.aux)))
    }

    fn project(&self, v: &SVec<C>) -> SVec<C> {
        vsub(v, &vleft(&inner(v, &self.u), &self.u))
    }

    pub fn residuals(&self, sign: MapSign) -> Result<ComponentResiduals<C>> {
        let u = &self.u;
        let psi = self.psi();
        let psib = self.psibar();
        let x = inner(&psib, &psi);
        let u_z = vmap(u, |e| e.d_dz())?;
        let u_zb = vmap(u, |e| e.d_dzbar())?;
        let u_zzb = vmap(&u_z, |e| e.d_dzbar())?;
        let quarter = c(0.25, 0.0);

        let t1 = vright(&psi, &inner(&psi, &u_zb));
        let t2 = vright(&psib, &inner(&psib, &u_z));
        let quad = match sign {
            MapSign::Plus => vadd(&t1, &t2),
            MapSign::Minus => vsub(&t1, &t2),
        };
        let r_map = vsub(&self.project(&u_zzb), &vscale(&quad, quarter));

        let psi_zb = vmap(&psi, |e| e.d_dzbar())?;
        let r_spinor = vsub(&self.project(&psi_zb), &vscale(&vleft(&x, &psib), quarter));
        let psib_z = vmap(&psib, |e| e.d_dz())?;
        let r_spinor_bar = vadd(&self.project(&psib_z), &vscale(&vleft(&x, &psi), quarter));

        let r_aux = vsub(&self.aux, &self.aux_from_spinor());
        Ok(ComponentResiduals { r_map, r_spinor, r_spinor_bar, r_aux })
    }

    /// Named defects of the identities expressing the θ-components of
    /// `D̄DΦ + ⟨D̄Φ, DΦ⟩Φ` through the component residuals.
    pub fn component_identities(&self, ss: &Superspace<C>) -> Result<Vec<(&'static str, f64)>> {
        let phi = self.assemble(ss)?;
        let parts = theta_parts(&phi_residual(&phi)?);
        let r = self.residuals(MapSign::Plus)?;
        let u = &self.u;
        let f = &self.aux;
        let psi = self.psi();
        let psib = self.psibar();
        let x = inner(&psib, &psi);

        let i = Complex64::i();
        let d0 = vmax_diff(&parts.e0, &vscale(&r.r_aux, i * 0.5));

        let dzb_upsi = inner(u, &psi).d_dzbar()?;
        let exp_tb = vscale(&r.r_spinor, c(-0.5, 0.0));
        let exp_tb = vsub(&exp_tb, &vleft(&inner(&psib, f).scale(i * 0.25), u));
        let exp_tb = vsub(&exp_tb, &vleft(&dzb_upsi.scale(c(0.5, 0.0)), u));
        let d_tb = vmax_diff(&parts.thetabar, &exp_tb);

        let dz_psibu = inner(&psib, u).d_dz()?;
        let exp_t = vscale(&r.r_spinor_bar, c(0.5, 0.0));
        let exp_t = vsub(&exp_t, &vleft(&inner(f, &psi).scale(i * 0.25), u));
        let exp_t = vadd(&exp_t, &vleft(&dz_psibu.scale(c(0.5, 0.0)), u));
        let d_t = vmax_diff(&parts.theta, &exp_t);

        let t_f = vsub(&vleft(&inner(f, &psi), &psib), &vleft(&inner(&psib, f), &psi));
        let exp_tt = vadd(&vscale(&r.r_map, c(-1.0, 0.0)), &vscale(&t_f, i * 0.125));
        let d_tan = vmax_diff(&self.project(&parts.theta_thetabar), &self.project(&exp_tt));

        let normal = inner(&parts.theta_thetabar, u);
        let exp_n = inner(&r.r_spinor, &psi)
            .sub(&inner(&psib, &r.r_spinor_bar))
            .scale(c(0.25, 0.0))
            .add(&x.mul(&x).scale(c(0.125, 0.0)))
            .add(&inner(f, f).scale(c(0.25, 0.0)))
            .add(&x.mul(&inner(f, u)).scale(i * 0.125));
        let d_n = normal.max_diff(&exp_n);

        Ok(vec![
            ("body", d0),
            ("theta", d_t),
            ("thetabar", d_tb),
            ("theta-thetabar tangential", d_tan),
            ("theta-thetabar normal", d_n),
        ])
    }
}

/// `D̄DΦ + ⟨D̄Φ, DΦ⟩Φ`
pub fn phi_residual<C: Coefficient>(phi: &SVec<C>) -> Result<SVec<C>> {
    let d = vmap(phi, op_d)?;
    let db = vmap(phi, op_dbar)?;
    let dbd = vmap(&d, op_dbar)?;
    Ok(vadd(&dbd, &vleft(&inner(&db, &d), phi)))
}

/// `w = η₁η₂ v` for a body field `v ⟂ u`. Adding `δw` keeps `⟨Φ, Φ⟩ = 1`
/// when every spinor term carries `η₁` or `η₂`.
pub fn eta_perturbation<C: Coefficient>(ss: &Superspace<C>, u: &SVec<C>, v: &SVec<C>) -> Result<SVec<C>> {
    let dev = inner(u, v).max_abs();
    if dev > PRECONDITION_TOL {
        return Err(Error::NotTangent(dev));
    }
    let e12 = ss.eta(1)?.mul(&ss.eta(2)?);
    Ok(vleft(&e12, v))
}

/// `⟨Φ, Φ⟩ − 1`
pub fn sphere_defect<C: Coefficient>(ss: &Superspace<C>, phi: &SVec<C>) -> f64 {
    inner(phi, phi).max_diff(&ss.one())
}

#[cfg(test)]
mod tests {
    use super::super::coeff::Jet;
    use super::*;

    fn ss() -> Superspace<Jet> {
        Superspace::new(2, Jet::constant_of(6, c(0.0, 0.0))).unwrap()
    }

    #[test]
    fn theta_derivatives() {
        let s = ss();
        let th = s.theta();
        let tb = s.thetabar();
        assert!(d_theta(&th).max_diff(&s.one()) < 1e-15);
        assert!(d_theta(&tb).is_zero());
        assert!(d_thetabar(&tb).max_diff(&s.one()) < 1e-15);
        // θ¹θ² = (i/2) θθ̄
        let t1 = Grassmann::generator(s.g(), THETA1, &s.template).unwrap();
        let t2 = Grassmann::generator(s.g(), THETA2, &s.template).unwrap();
        assert!(t1.mul(&t2).max_diff(&th.mul(&tb).scale(c(0.0, 0.5))) < 1e-15);
    }

    #[test]
    fn d_squares_to_minus_dz() {
        let s = ss();
        let z = Jet::var_z(6, 0.2, 0.1);
        let f = s.scalar(z.exp()).add(&s.eta(1).unwrap().mul(&s.theta()).mul_coeff(&z.mul(&z)));
        let dd = op_d(&op_d(&f).unwrap()).unwrap();
        assert!(dd.max_diff(&f.d_dz().unwrap().scale(c(-1.0, 0.0))) < 1e-13);
        let mixed = op_d(&op_dbar(&f).unwrap()).unwrap().add(&op_dbar(&op_d(&f).unwrap()).unwrap());
        assert!(mixed.max_abs() < 1e-13);
    }

    #[test]
    fn preconditions() {
        let s = ss();
        let t = Jet::constant_of(6, c(0.0, 0.0));
        let one = t.constant(c(1.0, 0.0));
        let u = s.body_vec(vec![one.clone(), t.clone(), t.clone()]);
        let e1 = s.eta(1).unwrap();
        // ψ along u is not tangent
        let bad = vec![e1.clone(), s.zero(), s.zero()];
        assert!(matches!(SuperField::from_spinor(&s, u.clone(), bad), Err(Error::NotTangent(_))));
        let even = vec![s.zero(), s.one(), s.zero()];
        assert!(matches!(SuperField::from_spinor(&s, u.clone(), even), Err(Error::Parity(_))));
        let off = s.body_vec(vec![one.scale(c(2.0, 0.0)), t.clone(), t]);
        let good = vec![s.zero(), e1, s.zero()];
        assert!(matches!(SuperField::from_spinor(&s, off, good), Err(Error::OffSphere(_))));
    }
}
