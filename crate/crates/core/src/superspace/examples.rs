//! Example superfields built from `u = (cos φ, sin φ, 0)` with tangent
//! `t = (−sin φ, cos φ, 0)` and `ψ = η₁ g t + η₂ h e₃`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coeff::Sample;
use super::field::{SuperField, Superspace};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuperExample {
    /// `φ = x`, `g = e^{iz}`, `h = i e^{−iz}`: `gh = i`, all component equations hold.
    Superharmonic,
    /// `φ = x`, `g = e^{iz}`, `h = e^{−iz}`: the map equation fails by `¼ η₁η₂ e₃`.
    SpinorCoupled,
    /// `φ = x`, `ψ = 0`: an ordinary harmonic map.
    HarmonicMap,
    /// `φ = x²`, `ψ = 0`: not harmonic.
    NonHarmonicMap,
}

impl SuperExample {
    pub const ALL: [SuperExample; 4] = [
        SuperExample::Superharmonic,
        SuperExample::SpinorCoupled,
        SuperExample::HarmonicMap,
        SuperExample::NonHarmonicMap,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuperExample::Superharmonic => "superharmonic",
            SuperExample::SpinorCoupled => "spinor_coupled",
            SuperExample::HarmonicMap => "harmonic_map",
            SuperExample::NonHarmonicMap => "nonharmonic_map",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == name).ok_or_else(|| Error::UnknownEntry {
            name: name.to_string(),
            available: Self::ALL.iter().map(|e| e.name()).collect::<Vec<_>>().join(", "),
        })
    }

    pub fn is_superharmonic(&self) -> bool {
        matches!(self, SuperExample::Superharmonic | SuperExample::HarmonicMap)
    }

    pub fn build<C: Sample>(&self, ss: &Superspace<C>) -> Result<SuperField<C>> {
        let t = &ss.template;
        let x = t.coord_x();
        let phi = match self {
            SuperExample::NonHarmonicMap => x.mul(&x),
            _ => x,
        };
        let (cp, sp) = (phi.cos_of(), phi.sin_of());
        let zero = t.constant(Complex64::from(0.0));
        let one = t.constant(Complex64::from(1.0));
        let u = ss.body_vec(vec![cp.clone(), sp.clone(), zero.clone()]);
        let tangent = [sp.scale(Complex64::from(-1.0)), cp, zero.clone()];
        let e3 = [zero.clone(), zero, one];

        // periodic in x
        let iz = t.coord_z().scale(Complex64::i());
        let g = iz.exp_of();
        let h = iz.scale(Complex64::from(-1.0)).exp_of();
        let (g, h) = match self {
            SuperExample::Superharmonic => (g, h.scale(Complex64::i())),
            SuperExample::SpinorCoupled => (g, h),
            _ => return SuperField::from_spinor(ss, u, ss.zero_vec(3)),
        };
        let (e1, e2) = (ss.eta(1)?, ss.eta(2)?);
        let psi = (0..3).map(|k| e1.mul_coeff(&g.mul(&tangent[k])).add(&e2.mul_coeff(&h.mul(&e3[k])))).collect();
        SuperField::from_spinor(ss, u, psi)
    }
}
