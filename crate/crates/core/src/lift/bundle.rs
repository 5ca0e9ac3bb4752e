//! Maurer–Cartan form of a sampled lift, its τ-grading, the λ-family and the
//! flatness and curvature-splitting identity residuals.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tau::{grade_index, TauAction, GRADES};
use crate::error::{Error, Result};
use crate::gridcalc::{curvature_residual, ConnectionGrid, GridMap};

type CGrid = GridMap<DMatrix<Complex64>>;

/// `α(∂z)` and `α(∂z̄)` split by grade, indexed by `k + 1`.
#[derive(Debug, Clone)]
pub struct Components {
    pub z: [CGrid; 4],
    pub zbar: [CGrid; 4],
}

impl Components {
    pub fn z(&self, k: i32) -> &CGrid {
        &self.z[grade_index(k)]
    }

    pub fn zbar(&self, k: i32) -> &CGrid {
        &self.zbar[grade_index(k)]
    }
}

#[derive(Debug, Clone)]
pub struct LiftBundle {
    pub tau: TauAction,
    /// Homogeneous `[[R, X], [0, 1]]`.
    pub f: GridMap<DMatrix<f64>>,
    pub alpha_x: GridMap<DMatrix<f64>>,
    pub alpha_y: GridMap<DMatrix<f64>>,
    /// `α(∂z) = ½(α_x − iα_y)`
    pub az: CGrid,
    pub azbar: CGrid,
    pub components: Components,
    /// Points where branch continuation changed sheet or the completion
    /// switched reference.
    pub continuity_flags: usize,
}

/// Homogeneous matrix of `(R, X)`.
pub fn homogeneous(r: &DMatrix<f64>, x: &[f64]) -> DMatrix<f64> {
    let n = r.nrows();
    let mut m = DMatrix::identity(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(r);
    for (k, v) in x.iter().enumerate() {
        m[(k, n)] = *v;
    }
    m
}

fn complexify(g: &GridMap<DMatrix<f64>>) -> CGrid {
    g.map(|m| m.map(Complex64::from))
}

/// Grade components of `α(∂z)` and `α(∂z̄)`.
pub fn decompose_alpha(az: &CGrid, azbar: &CGrid, tau: &TauAction) -> Components {
    let split = |g: &CGrid| GRADES.map(|k| g.map(|m| tau.project(k, m)));
    Components { z: split(az), zbar: split(azbar) }
}

impl LiftBundle {
    pub fn new(f: GridMap<DMatrix<f64>>, tau: TauAction, continuity_flags: usize) -> Result<Self> {
        let n = tau.n() + 1;
        if f.values[0].shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "frame of shape {:?} for {}",
                f.values[0].shape(),
                tau.group.name()
            )));
        }
        let inv = f.map(|m| m.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN)));
        if inv.valid_values().any(|m| m[(0, 0)].is_nan()) {
            return Err(Error::NotInvertible);
        }
        let fx = f.d_dx()?;
        let fy = f.d_dy()?;
        let alpha_x = inv.zip_map(&fx, |a, b| a * b);
        let alpha_y = inv.zip_map(&fy, |a, b| a * b);
        let valid = alpha_x.valid.intersect(&alpha_y.valid);
        let (alpha_x, alpha_y) = (alpha_x.restrict(valid), alpha_y.restrict(valid));
        let cx = complexify(&alpha_x);
        let cy = complexify(&alpha_y).map(|m| m * Complex64::i());
        let az = cx.lin(0.5, &cy, -0.5);
        let azbar = cx.lin(0.5, &cy, 0.5);
        let components = decompose_alpha(&az, &azbar, &tau);
        Ok(Self { tau, f, alpha_x, alpha_y, az, azbar, components, continuity_flags })
    }

    /// `max(sup|α_x|, sup|α_y|)`
    pub fn alpha_scale(&self) -> f64 {
        self.alpha_x.sup_norm().max(self.alpha_y.sup_norm())
    }

    /// `sup |Σ_k P_k α − α|` over both complex directions.
    pub fn reconstruction_defect(&self) -> f64 {
        let sum = |parts: &[CGrid; 4]| parts[1..].iter().fold(parts[0].clone(), |a, p| a.lin(1.0, p, 1.0));
        let dz = sum(&self.components.z).sub(&self.az).sup_norm();
        let dzb = sum(&self.components.zbar).sub(&self.azbar).sup_norm();
        dz.max(dzb)
    }

    /// `sup |conj(α₋₁) − α₁|` on the real directions `∂x`, `∂y`.
    pub fn conjugation_defect(&self) -> f64 {
        let mut sup: f64 = 0.0;
        for a in [&self.alpha_x, &self.alpha_y] {
            for m in a.valid_values() {
                let c = m.map(Complex64::from);
                let lo = self.tau.project(-1, &c).map(|z| z.conj());
                let hi = self.tau.project(1, &c);
                sup = sup.max((lo - hi).norm());
            }
        }
        sup
    }
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if lambda.norm() == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroLambda);
    }
    Ok(())
}

/// `(α_λ(∂z), α_λ(∂z̄))` with
/// `α_λ = λ⁻²α₂′ + λ⁻¹α₋₁ + α₀ + λα₁ + λ²α₂″`.
pub fn alpha_lambda(b: &LiftBundle, lambda: Complex64) -> Result<(CGrid, CGrid)> {
    check_lambda(lambda)?;
    let c = &b.components;
    let weights_z = [lambda.powi(-1), Complex64::from(1.0), lambda, lambda.powi(-2)];
    let weights_zbar = [lambda.powi(-1), Complex64::from(1.0), lambda, lambda.powi(2)];
    Ok((weighted(&c.z, weights_z), weighted(&c.zbar, weights_zbar)))
}

/// `β_{λ²} = λ⁻²α₂′ + α₀ + λ²α₂″`
pub fn beta_lambda2(b: &LiftBundle, lambda: Complex64) -> Result<(CGrid, CGrid)> {
    check_lambda(lambda)?;
    let c = &b.components;
    let zero = Complex64::from(0.0);
    let one = Complex64::from(1.0);
    Ok((weighted(&c.z, [zero, one, zero, lambda.powi(-2)]), weighted(&c.zbar, [zero, one, zero, lambda.powi(2)])))
}

fn weighted(parts: &[CGrid; 4], w: [Complex64; 4]) -> CGrid {
    let mut out = parts[0].map(|m| m * w[0]);
    for (p, wk) in parts.iter().zip(w).skip(1) {
        out = out.zip_map(p, |a, b| a + b * wk);
    }
    out
}

fn curvature_of(az: &CGrid, azbar: &CGrid) -> Result<CGrid> {
    curvature_residual(&ConnectionGrid::from_complex(az, azbar)?)
}

/// `sup |dα_λ + ½[α_λ ∧ α_λ]|` (coefficient of `dx∧dy`).
pub fn flatness_residual(b: &LiftBundle, lambda: Complex64) -> Result<f64> {
    let (az, azbar) = alpha_lambda(b, lambda)?;
    Ok(curvature_of(&az, &azbar)?.sup_norm())
}

/// Same for `β_{λ²}`.
pub fn beta_flatness_residual(b: &LiftBundle, lambda: Complex64) -> Result<f64> {
    let (az, azbar) = beta_lambda2(b, lambda)?;
    Ok(curvature_of(&az, &azbar)?.sup_norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaurentResidual {
    pub degree: i32,
    pub residual: f64,
}

/// Curvature of `α_λ` sampled at the 8th roots of unity and split into its
/// Laurent coefficients of degree −3..3 by a discrete Fourier transform.
pub fn flatness_laurent(b: &LiftBundle) -> Result<Vec<LaurentResidual>> {
    let roots: Vec<Complex64> =
        (0..8).map(|m| Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 / 4.0)).collect();
    let samples: Vec<CGrid> = roots
        .iter()
        .map(|l| {
            let (az, azbar) = alpha_lambda(b, *l)?;
            curvature_of(&az, &azbar)
        })
        .collect::<Result<_>>()?;
    Ok((-3..=3)
        .map(|d| {
            let mut acc = samples[0].map(|m| m * roots[0].powi(-d));
            for (s, l) in samples.iter().zip(&roots).skip(1) {
                acc = acc.zip_map(s, |a, c| a + c * l.powi(-d));
            }
            LaurentResidual { degree: d, residual: acc.sup_norm() / 8.0 }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSplitResidual {
    /// `sup |LHS − RHS|`
    pub residual: f64,
    /// `sup |(λ⁻³−λ)[α₂′∧α₋₁″]|`
    pub extra_minus: f64,
    /// `sup |(λ³−λ⁻¹)[α₂″∧α₁′]|`
    pub extra_plus: f64,
    /// `sup |LHS|`, for scale.
    pub lhs: f64,
}

/// `curv(α_λ) = curv(β_{λ²}) + (λ⁻³−λ)[α₂′∧α₋₁″] + (λ³−λ⁻¹)[α₂″∧α₁′]`,
/// both sides evaluated independently.
///
/// For `a dz` and `b dz̄` the `dx∧dy` coefficient of `[a dz ∧ b dz̄]` is
/// `−2i[a, b]`.
pub fn curvature_split_residual(b: &LiftBundle, lambda: Complex64) -> Result<CurvatureSplitResidual> {
    let (az, azbar) = alpha_lambda(b, lambda)?;
    let lhs = curvature_of(&az, &azbar)?;
    let (bz, bzbar) = beta_lambda2(b, lambda)?;
    let beta = curvature_of(&bz, &bzbar)?;
    let c = &b.components;
    let i2 = Complex64::new(0.0, 2.0);
    let c_minus = lambda.powi(-3) - lambda;
    let c_plus = lambda.powi(3) - lambda.powi(-1);
    let extra_minus = c.z(2).zip_map(c.zbar(-1), |a, m| (a * m - m * a) * (-i2 * c_minus));
    let extra_plus = c.zbar(2).zip_map(c.z(1), |a, m| (a * m - m * a) * (i2 * c_plus));
    let rhs = beta.lin(1.0, &extra_minus, 1.0).lin(1.0, &extra_plus, 1.0);
    let diff = lhs.sub(&rhs);
    Ok(CurvatureSplitResidual {
        residual: diff.sup_norm(),
        extra_minus: extra_minus.restrict(diff.valid).sup_norm(),
        extra_plus: extra_plus.restrict(diff.valid).sup_norm(),
        lhs: lhs.sup_norm(),
    })
}

/// `sup |α₋₁″| / sup |α|`; zero exactly when `F` lifts the left Gauss map.
pub fn lift_condition_residual(b: &LiftBundle) -> f64 {
    let scale = b.alpha_scale();
    if scale == 0.0 {
        return 0.0;
    }
    b.components.zbar(-1).sup_norm() / scale
}
