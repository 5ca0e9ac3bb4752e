//! Conformal immersions into `H`: tangent frames, the Gauss pair `(ρ, σ)`,
//! Lagrangian angle, mean curvature and the HSL / special Lagrangian / CMC
//! criteria.
//!
//! First derivatives come from analytic jets when the immersion carries them
//! and from central differences otherwise. Second derivatives, and every
//! derivative of `β` or of the Gauss map, are always finite differences.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::{Octonion, Quaternion};
use crate::error::{Error, Result};
use crate::gridcalc::{tension_sphere, GridMap};

/// Below this `|X_x|` a point is treated as a branch point.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// `(X_x, X_y)` on the grid.
pub type Tangents = (GridMap<DVector<f64>>, GridMap<DVector<f64>>);

#[derive(Debug, Clone)]
pub struct Immersion {
    pub x: GridMap<DVector<f64>>,
    /// Analytic `(X_x, X_y)` sampled on the same grid.
    pub jets: Option<Tangents>,
}

pub fn vec_to_quaternion(v: &DVector<f64>) -> Quaternion {
    match v.len() {
        3 => Quaternion::new(0.0, v[0], v[1], v[2]),
        _ => Quaternion::new(v[0], v[1], v[2], v[3]),
    }
}

pub fn vec_to_octonion(v: &DVector<f64>) -> Octonion {
    let mut c = [0.0; 8];
    match v.len() {
        3 => c[1..4].copy_from_slice(v.as_slice()),
        n => c[..n.min(8)].copy_from_slice(&v.as_slice()[..n.min(8)]),
    }
    Octonion(c)
}

fn check_values(x: &GridMap<DVector<f64>>) -> Result<usize> {
    let dim = x.values.first().map(|v| v.len()).unwrap_or(0);
    if ![3, 4, 8].contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    for (k, v) in x.values.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!("value {k} has length {} instead of {dim}", v.len())));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(k * dim));
        }
    }
    Ok(dim)
}

impl Immersion {
    pub fn new(x: GridMap<DVector<f64>>) -> Result<Self> {
        check_values(&x)?;
        Ok(Self { x, jets: None })
    }

    pub fn with_jets(x: GridMap<DVector<f64>>, xx: GridMap<DVector<f64>>, xy: GridMap<DVector<f64>>) -> Result<Self> {
        let dim = check_values(&x)?;
        for j in [&xx, &xy] {
            if check_values(j)? != dim || j.domain != x.domain {
                return Err(Error::DimensionMismatch("jets do not match the immersion".into()));
            }
        }
        Ok(Self { x, jets: Some((xx, xy)) })
    }

    pub fn dim(&self) -> usize {
        self.x.values[0].len()
    }

    /// `(X_x, X_y)`, analytic when available.
    pub fn first_derivatives(&self) -> Result<Tangents> {
        match &self.jets {
            Some((a, b)) => Ok((a.restrict(self.x.valid), b.restrict(self.x.valid))),
            None => self.fd_first_derivatives(),
        }
    }

    pub fn fd_first_derivatives(&self) -> Result<Tangents> {
        let dx = self.x.d_dx()?;
        let dy = self.x.d_dy()?;
        let valid = dx.valid.intersect(&dy.valid);
        Ok((dx.restrict(valid), dy.restrict(valid)))
    }

    fn quaternions(g: &GridMap<DVector<f64>>) -> Result<GridMap<Quaternion>> {
        if g.values[0].len() == 8 {
            return Err(Error::UnsupportedDimension(8));
        }
        Ok(g.map(vec_to_quaternion))
    }

    pub fn as_quaternions(&self) -> Result<GridMap<Quaternion>> {
        Self::quaternions(&self.x)
    }

    /// Quaternion-valued `(X_x, X_y)`.
    pub fn quaternion_derivatives(&self) -> Result<(GridMap<Quaternion>, GridMap<Quaternion>)> {
        let (a, b) = self.first_derivatives()?;
        Ok((Self::quaternions(&a)?, Self::quaternions(&b)?))
    }
}

/// Scale-invariant defect `(| |X_x| − |X_y| |·|X_x| + |⟨X_x, X_y⟩|) / |X_x|²`.
pub fn conformality_residual(imm: &Immersion) -> Result<f64> {
    let (a, b) = imm.first_derivatives()?;
    let mut sup: f64 = 0.0;
    for (i, j) in a.valid.intersect(&b.valid).iter() {
        let (xx, xy) = (a.at(i, j), b.at(i, j));
        let n = xx.norm();
        if n < DEGENERATE_EPS {
            return Err(Error::Degenerate(n));
        }
        let r = ((n - xy.norm()).abs() * n + xx.dot(xy).abs()) / (n * n);
        sup = sup.max(r);
    }
    Ok(sup)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussOptions {
    pub conformal_tol: f64,
    pub lagrangian_tol: f64,
}

impl Default for GaussOptions {
    fn default() -> Self {
        Self { conformal_tol: 1e-4, lagrangian_tol: 1e-8 }
    }
}

#[derive(Debug, Clone)]
pub struct GaussData {
    pub e1: GridMap<Quaternion>,
    pub e2: GridMap<Quaternion>,
    pub rho: GridMap<Quaternion>,
    pub sigma: GridMap<Quaternion>,
    /// `e^ω = |X_x|`
    pub conformal_factor: GridMap<f64>,
    /// `(ω₁, ω₂, ω₃)(e1, e2)` with `ω_a = ⟨L_a ·, ·⟩`.
    pub omegas: GridMap<[f64; 3]>,
    pub conformality: f64,
    /// `sup |X_y − ρ X_x| / |X_x|` with finite-difference derivatives.
    pub defining_relation: f64,
    pub lagrangian: f64,
    beta: std::result::Result<GridMap<f64>, Error>,
}

impl GaussData {
    /// Unwrapped Lagrangian angle on the open fundamental rectangle.
    pub fn beta(&self) -> Result<&GridMap<f64>> {
        self.beta.as_ref().map_err(Clone::clone)
    }

    pub fn is_lagrangian(&self) -> bool {
        self.beta.is_ok() || !matches!(self.beta, Err(Error::NotLagrangian(_)))
    }
}

pub fn gauss_data(imm: &Immersion, opts: &GaussOptions) -> Result<GaussData> {
    let conformality = conformality_residual(imm)?;
    if conformality > opts.conformal_tol {
        return Err(Error::NotConformal(conformality));
    }
    let (xx, xy) = imm.quaternion_derivatives()?;
    let e1 = xx.map(|q| q.normalize());
    let e2 = xy.map(|q| q.normalize());
    let rho = e2.zip_map(&e1, |b, a| *b * a.conj());
    let sigma = e1.zip_map(&e2, |a, b| a.conj() * *b);
    let conformal_factor = xx.map(|q| q.norm());
    let omegas = e1.zip_map(&e2, |a, b| {
        [(Quaternion::I * *a).dot(*b), (Quaternion::J * *a).dot(*b), (Quaternion::K * *a).dot(*b)]
    });

    let (fx, fy) = imm.fd_first_derivatives()?;
    let fx = Immersion::quaternions(&fx)?;
    let fy = Immersion::quaternions(&fy)?;
    let mut defining_relation: f64 = 0.0;
    for (i, j) in fx.valid.intersect(&rho.valid).iter() {
        let (a, b) = (*fx.at(i, j), *fy.at(i, j));
        defining_relation = defining_relation.max((b - *rho.at(i, j) * a).norm() / a.norm());
    }

    let lagrangian = lagrangian_from_parts(&xx, &xy, &rho);
    let beta = if lagrangian > opts.lagrangian_tol {
        Err(Error::NotLagrangian(lagrangian))
    } else {
        unwrap_angle(&rho.opened().map(|r| r.z.atan2(r.y)))
    };
    Ok(GaussData { e1, e2, rho, sigma, conformal_factor, omegas, conformality, defining_relation, lagrangian, beta })
}

fn lagrangian_from_parts(xx: &GridMap<Quaternion>, xy: &GridMap<Quaternion>, rho: &GridMap<Quaternion>) -> f64 {
    let mut sup: f64 = 0.0;
    for (i, j) in rho.valid.iter() {
        let (a, b) = (*xx.at(i, j), *xy.at(i, j));
        let form = (Quaternion::I * a).dot(b).abs() / a.norm_sqr();
        sup = sup.max(form).max(rho.at(i, j).x.abs());
    }
    sup
}

/// `max(sup |ω₁(X_x, X_y)| / e^{2ω}, sup |⟨ρ_X, i⟩|)`.
pub fn lagrangian_residual(imm: &Immersion) -> Result<f64> {
    let (xx, xy) = imm.quaternion_derivatives()?;
    let rho = xy.zip_map(&xx, |b, a| b.normalize() * a.normalize().conj());
    Ok(lagrangian_from_parts(&xx, &xy, &rho))
}

/// Greedy nearest-branch continuation: along the first row in `y`, then each
/// point from its left neighbour.
pub fn unwrap_angle(raw: &GridMap<f64>) -> Result<GridMap<f64>> {
    let v = raw.valid;
    let mut out = raw.clone();
    let nearest = |prev: f64, a: f64| prev + (a - prev + PI).rem_euclid(2.0 * PI) - PI;
    for j in v.j0 + 1..v.j1 {
        let k = raw.domain.index(v.i0, j);
        let prev = out.values[raw.domain.index(v.i0, j - 1)];
        out.values[k] = nearest(prev, raw.values[k]);
    }
    for i in v.i0 + 1..v.i1 {
        for j in v.j0..v.j1 {
            let k = raw.domain.index(i, j);
            let prev = out.values[raw.domain.index(i - 1, j)];
            out.values[k] = nearest(prev, raw.values[k]);
        }
    }
    for (i, j) in v.iter() {
        let b = *out.at(i, j);
        let mut neighbours = Vec::with_capacity(2);
        if i + 1 < v.i1 {
            neighbours.push(*out.at(i + 1, j));
        }
        if j + 1 < v.j1 {
            neighbours.push(*out.at(i, j + 1));
        }
        if let Some(jump) = neighbours.into_iter().map(|n| (n - b).abs()).find(|d| *d > PI / 2.0) {
            return Err(Error::BranchJump { i, j, jump });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct MeanCurvature {
    /// Full-trace mean curvature vector.
    pub h: GridMap<Quaternion>,
    pub j_grad_beta: GridMap<Quaternion>,
    /// `sup |H⃗ − J∇β|`
    pub identity_residual: f64,
    pub sup_full_trace: f64,
    pub sup_half_trace: f64,
}

pub fn mean_curvature(imm: &Immersion, gd: &GaussData) -> Result<MeanCurvature> {
    let beta = gd.beta()?;
    let lap = Immersion::quaternions(&imm.x.laplacian()?)?;
    let (xx, xy) = imm.quaternion_derivatives()?;
    let h = lap.map_indexed(|i, j, d| {
        let (a, b) = (*gd.e1.at(i, j), *gd.e2.at(i, j));
        let normal = *d - a * a.dot(*d) - b * b.dot(*d);
        normal * (1.0 / gd.conformal_factor.at(i, j).powi(2))
    });
    let h = GridMap { valid: lap.valid.intersect(&gd.e1.valid), ..h };
    let bx = beta.d_dx()?;
    let by = beta.d_dy()?;
    let mut jgb = h.clone();
    jgb.valid = h.valid.intersect(&bx.valid).intersect(&by.valid);
    let mut identity_residual: f64 = 0.0;
    let mut sup_full: f64 = 0.0;
    for (i, j) in jgb.valid.iter() {
        let k = h.domain.index(i, j);
        let e2w = gd.conformal_factor.values[k].powi(2);
        let v =
            (Quaternion::I * xx.values[k] * bx.values[k] + Quaternion::I * xy.values[k] * by.values[k]) * (1.0 / e2w);
        jgb.values[k] = v;
        identity_residual = identity_residual.max((h.values[k] - v).norm());
        sup_full = sup_full.max(h.values[k].norm());
    }
    Ok(MeanCurvature {
        h: h.restrict(jgb.valid),
        j_grad_beta: jgb,
        identity_residual,
        sup_full_trace: sup_full,
        sup_half_trace: 0.5 * sup_full,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HslResidual {
    /// `sup |Δβ|` with the flat Laplacian.
    pub flat: f64,
    /// `sup e^{−2ω}|Δβ|`
    pub induced: f64,
}

/// Residual of `Δβ = 0` for a prescribed angle.
pub fn hsl_residual_from_beta(beta: &GridMap<f64>, conformal_factor: Option<&GridMap<f64>>) -> Result<HslResidual> {
    let lap = beta.laplacian()?;
    let mut flat: f64 = 0.0;
    let mut induced: f64 = 0.0;
    for (i, j) in lap.valid.iter() {
        let v = lap.at(i, j).abs();
        flat = flat.max(v);
        let s = conformal_factor.map(|c| c.at(i, j).powi(-2)).unwrap_or(1.0);
        induced = induced.max(s * v);
    }
    Ok(HslResidual { flat, induced })
}

pub fn hsl_residual(gd: &GaussData) -> Result<HslResidual> {
    hsl_residual_from_beta(gd.beta()?, Some(&gd.conformal_factor))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialLagrangian {
    pub special: bool,
    /// `max |β − mean β|`
    pub deviation: f64,
    pub mean: f64,
}

pub fn special_lagrangian_check(gd: &GaussData, tol: f64) -> Result<SpecialLagrangian> {
    let beta = gd.beta()?;
    let vals: Vec<f64> = beta.valid_values().copied().collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let deviation = vals.iter().map(|b| (b - mean).abs()).fold(0.0, f64::max);
    Ok(SpecialLagrangian { special: deviation < tol, deviation, mean })
}

#[derive(Debug, Clone)]
pub struct CmcReport {
    /// `sup |ρ + σ|`
    pub rho_plus_sigma: f64,
    pub tension: GridMap<DVector<f64>>,
    pub tension_sup: f64,
    /// `H = ½ e^{−2ω} ⟨ΔX, N⟩` with `N = ρ_X`.
    pub mean_curvature: GridMap<f64>,
    pub mean_curvature_mean: f64,
    pub mean_curvature_spread: f64,
}

pub fn cmc_check(imm: &Immersion, gd: &GaussData) -> Result<CmcReport> {
    let q = imm.as_quaternions()?;
    let re = q.valid_values().map(|p| p.w.abs()).fold(0.0, f64::max);
    if re > 1e-10 {
        return Err(Error::NotInImH(re));
    }
    let rho_plus_sigma =
        gd.rho.zip_map(&gd.sigma, |a, b| (*a + *b).norm()).valid_values().fold(0.0, |m: f64, v| m.max(*v));
    let n = gd.rho.map(|r| DVector::from_vec(vec![r.x, r.y, r.z]));
    let tension = tension_sphere(&n)?;
    let tension_sup = tension.sup_norm();
    let lap = Immersion::quaternions(&imm.x.laplacian()?)?;
    let h = lap.zip_map(&gd.rho, |d, r| d.dot(*r));
    let h = h.zip_map(&gd.conformal_factor, |v, c| 0.5 * v / (c * c));
    let vals: Vec<f64> = h.valid_values().copied().collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), v| (l.min(*v), u.max(*v)));
    Ok(CmcReport {
        rho_plus_sigma,
        tension,
        tension_sup,
        mean_curvature: h,
        mean_curvature_mean: mean,
        mean_curvature_spread: hi - lo,
    })
}

/// Octonionic frames `(e1, e2)` and left Gauss map `ρ = e2 ē1`.
pub fn octonion_gauss(imm: &Immersion) -> Result<(GridMap<Octonion>, GridMap<Octonion>, GridMap<Octonion>)> {
    let (xx, xy) = imm.first_derivatives()?;
    let e1 = xx.map(|v| vec_to_octonion(v).normalize());
    let e2 = xy.map(|v| vec_to_octonion(v).normalize());
    let rho = e2.zip_map(&e1, |b, a| *b * a.conj());
    Ok((e1, e2, rho))
}
