//! Sparse Grassmann elements `Σ_S c_S ξ_S` over `g` generators, with
//! `ξ_S` the ordered product of the generators in the bitmask `S`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::coeff::Coefficient;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Sign of `ξ_A ξ_B = ± ξ_{A∪B}` for disjoint `A`, `B`.
pub fn reorder_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let k = rest.trailing_zeros();
        swaps += (a >> (k + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone)]
pub struct Grassmann<C> {
    g: usize,
    terms: BTreeMap<u32, C>,
}

impl<C: Coefficient> Grassmann<C> {
    pub fn zero(g: usize) -> Self {
        Self { g, terms: BTreeMap::new() }
    }

    pub fn scalar(g: usize, c: C) -> Self {
        Self::zero(g).with_term(0, c)
    }

    /// `c ξ_mask`
    pub fn term(g: usize, mask: u32, c: C) -> Result<Self> {
        if g < 32 && mask >> g != 0 {
            return Err(Error::GeneratorBudget { index: 31 - mask.leading_zeros() as usize, budget: g });
        }
        Ok(Self::zero(g).with_term(mask, c))
    }

    /// The generator `ξ_k` with coefficient one shaped like `template`.
    pub fn generator(g: usize, k: usize, template: &C) -> Result<Self> {
        if k >= g {
            return Err(Error::GeneratorBudget { index: k, budget: g });
        }
        Ok(Self::zero(g).with_term(1 << k, template.constant(Complex64::from(1.0))))
    }

    fn with_term(mut self, mask: u32, c: C) -> Self {
        if !c.is_zero() {
            self.terms.insert(mask, c);
        }
        self
    }

    pub fn generators(&self) -> usize {
        self.g
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &C)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, mask: u32) -> Option<&C> {
        self.terms.get(&mask)
    }

    pub fn body(&self) -> Option<&C> {
        self.coefficient(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_same(&self, o: &Self) -> Result<()> {
        if self.g != o.g {
            return Err(Error::DimensionMismatch(format!("{} vs {} generators", self.g, o.g)));
        }
        Ok(())
    }

    fn accumulate(terms: &mut BTreeMap<u32, C>, mask: u32, c: C) {
        match terms.get_mut(&mask) {
            Some(v) => *v = v.add(&c),
            None => {
                terms.insert(mask, c);
            }
        }
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.g, o.g);
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            Self::accumulate(&mut terms, *m, c.clone());
        }
        Self { g: self.g, terms }.pruned()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(Complex64::from(-1.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (*m, c.scale(s))).collect();
        Self { g: self.g, terms }.pruned()
    }

    /// Multiplies every coefficient by the (commuting) function `f`.
    pub fn mul_coeff(&self, f: &C) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (*m, c.mul(f))).collect();
        Self { g: self.g, terms }.pruned()
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.g, o.g);
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                if a & b != 0 {
                    continue;
                }
                let c = ca.mul(cb).scale(Complex64::from(reorder_sign(*a, *b)));
                Self::accumulate(&mut terms, a | b, c);
            }
        }
        Self { g: self.g, terms }.pruned()
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(self.mul(o))
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same(o)?;
        Ok(self.add(o))
    }

    /// `None` for a mixed element. Zero counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut even = false;
        let mut odd = false;
        for m in self.terms.keys() {
            if m.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            _ => None,
        }
    }

    /// Zero satisfies either parity.
    pub fn require(&self, p: Parity, what: &str) -> Result<()> {
        if self.is_zero() {
            return Ok(());
        }
        match self.parity() {
            Some(q) if q == p => Ok(()),
            other => Err(Error::Parity(format!("{what}: expected {p:?}, found {other:?}"))),
        }
    }

    /// Left derivative `∂/∂ξ_k`.
    pub fn d_gen(&self, k: usize) -> Self {
        let bit = 1u32 << k;
        let below = bit - 1;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| *m & bit != 0)
            .map(|(m, c)| {
                let s = if (m & below).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                (m & !bit, c.scale(Complex64::from(s)))
            })
            .collect();
        Self { g: self.g, terms }
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> Result<C>) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(*m, f(c)?);
        }
        Ok(Self { g: self.g, terms }.pruned())
    }

    pub fn d_dz(&self) -> Result<Self> {
        self.map_coeffs(|c| c.d_dz())
    }

    pub fn d_dzbar(&self) -> Result<Self> {
        self.map_coeffs(|c| c.d_dzbar())
    }

    /// Coefficient-wise complex conjugation (generators are real).
    pub fn conj(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (*m, c.conj())).collect();
        Self { g: self.g, terms }
    }

    pub fn restrict(&self, keep: impl Fn(u32) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| keep(**m)).map(|(m, c)| (*m, c.clone())).collect();
        Self { g: self.g, terms }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    /// Inverse of an even element with invertible body:
    /// `(b + n)⁻¹ = Σ_k (−b⁻¹ n)^k b⁻¹`, terminating since `n` is nilpotent.
    pub fn recip(&self) -> Result<Self> {
        self.require(Parity::Even, "inverse")?;
        let body = self.body().ok_or(Error::NotInvertible)?;
        let binv = Self::scalar(self.g, body.recip()?);
        let nil = self.restrict(|m| m != 0);
        let step = binv.mul(&nil).scale(Complex64::from(-1.0));
        let mut out = binv.clone();
        let mut power = binv;
        for _ in 0..=(self.g / 2) {
            power = step.mul(&power);
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `exp` of a nilpotent even element by its terminating series.
    pub fn exp_nilpotent(&self, template: &C) -> Result<Self> {
        self.require(Parity::Even, "exponential")?;
        if self.body().is_some() {
            return Err(Error::Parity("exponential of an element with a body".into()));
        }
        let mut out = Self::scalar(self.g, template.constant(Complex64::from(1.0)));
        let mut power = out.clone();
        for k in 1..=(self.g / 2) {
            power = power.mul(self).scale(Complex64::from(1.0 / k as f64));
            out = out.add(&power);
        }
        Ok(out)
    }

    pub fn max_diff(&self, o: &Self) -> f64 {
        self.sub(o).max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = Grassmann<Complex64>;
    fn gen(k: usize) -> G {
        G::generator(4, k, &Complex64::from(0.0)).unwrap()
    }
    fn one() -> G {
        G::scalar(4, Complex64::from(1.0))
    }

    #[test]
    fn anticommutation() {
        let (a, b) = (gen(0), gen(1));
        assert!(a.mul(&b).add(&b.mul(&a)).is_zero());
        assert!(a.mul(&a).is_zero());
        assert_eq!(a.mul(&b).parity(), Some(Parity::Even));
        assert_eq!(a.add(&one()).parity(), None);
    }

    #[test]
    fn hand_expansion() {
        // (1 + ξ0 + 2 ξ1ξ2)(3 − ξ0 + ξ2) = 3 + 2ξ0 + ξ2 + ξ0ξ2 + 6ξ1ξ2 − 2ξ1ξ2ξ0
        let l = one().add(&gen(0)).add(&gen(1).mul(&gen(2)).scale(Complex64::from(2.0)));
        let r = one().scale(Complex64::from(3.0)).sub(&gen(0)).add(&gen(2));
        let p = l.mul(&r);
        let c = |m: u32| p.coefficient(m).copied().unwrap_or_default().re;
        assert_eq!(c(0), 3.0);
        assert_eq!(c(0b1), 2.0);
        assert_eq!(c(0b100), 1.0);
        assert_eq!(c(0b101), 1.0);
        assert_eq!(c(0b110), 6.0);
        // ξ1ξ2ξ0 = ξ0ξ1ξ2
        assert_eq!(c(0b111), -2.0);
        assert_eq!(p.terms().count(), 6);
    }

    #[test]
    fn left_derivative_is_odd_derivation() {
        let x = gen(0).mul(&gen(1)).mul(&gen(2)).add(&gen(3));
        let y = gen(1).mul(&gen(2)).mul(&gen(3)).add(&gen(0));
        for k in 0..4 {
            // ∂(xy) = (∂x) y − x ∂y for odd x
            let lhs = x.mul(&y).d_gen(k);
            let rhs = x.d_gen(k).mul(&y).sub(&x.mul(&y.d_gen(k)));
            assert!(lhs.max_diff(&rhs) < 1e-15);
        }
    }

    #[test]
    fn inverse_and_exponential() {
        let n = gen(0).mul(&gen(1)).add(&gen(2).mul(&gen(3)).scale(Complex64::new(0.0, 2.0)));
        let x = one().scale(Complex64::from(2.0)).add(&n);
        assert!(x.recip().unwrap().mul(&x).max_diff(&one()) < 1e-15);
        let e = n.exp_nilpotent(&Complex64::from(0.0)).unwrap();
        let em = n.scale(Complex64::from(-1.0)).exp_nilpotent(&Complex64::from(0.0)).unwrap();
        assert!(e.mul(&em).max_diff(&one()) < 1e-15);
        assert!(matches!(gen(0).recip(), Err(Error::Parity(_))));
        assert!(matches!(n.recip(), Err(Error::NotInvertible)));
    }

    #[test]
    fn budget_errors() {
        assert!(matches!(G::generator(4, 4, &Complex64::from(0.0)), Err(Error::GeneratorBudget { .. })));
        assert!(matches!(G::term(2, 0b100, Complex64::from(1.0)), Err(Error::GeneratorBudget { .. })));
        let a = G::generator(3, 0, &Complex64::from(0.0)).unwrap();
        assert!(a.try_mul(&gen(1)).is_err());
    }
}
