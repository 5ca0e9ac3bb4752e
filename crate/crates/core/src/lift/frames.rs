//! Constructions of lifts `F = (R, X)` of `(X, ρ_X)` and the U(2)/U(1)
//! reduction checks for Lagrangian surfaces.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::bundle::{homogeneous, LiftBundle};
use super::tau::{build_tau, Group};
use crate::algebra::{fiber_point_near, rotor_to, AlgebraContext, AlgebraElement, Octonion, Quaternion};
use crate::error::{Error, Result};
use crate::gauss::{octonion_gauss, vec_to_octonion, vec_to_quaternion, GaussData, Immersion};
use crate::gridcalc::{GridDomain, GridMap, Region};

fn m4(m: Matrix4<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(4, 4, m.as_slice())
}

fn quat_ctx(ctx: &AlgebraContext) -> Result<Quaternion> {
    match ctx.u {
        AlgebraElement::Quat(q) => Ok(q),
        AlgebraElement::Oct(_) => Err(Error::MixedAlgebra(4, 8)),
    }
}

fn columns(cols: [Quaternion; 4]) -> Matrix4<f64> {
    Matrix4::from_columns(&cols.map(|q| q.to_vector()))
}

fn row_major_order(valid: Region) -> impl Iterator<Item = ((usize, usize), Option<(usize, usize)>)> {
    let first = (valid.j0..valid.j1).map(move |j| ((valid.i0, j), (j > valid.j0).then(|| (valid.i0, j - 1))));
    let rest =
        (valid.i0 + 1..valid.i1).flat_map(move |i| (valid.j0..valid.j1).map(move |j| ((i, j), Some((i - 1, j)))));
    first.chain(rest)
}

/// Smooth `p` with `p u p̄ = ρ`: the minimal rotation taking a reference
/// direction `ρ₀` to `ρ`, composed with a fixed rotor taking `u` to `ρ₀`.
/// `ρ₀` is chosen among axis and diagonal directions to stay as far as
/// possible from the antipodes of the sampled `ρ`.
pub fn smooth_rotors(rho: &GridMap<Quaternion>, u: Quaternion) -> Result<GridMap<Quaternion>> {
    let mut candidates = Vec::new();
    for a in [-1.0, 0.0, 1.0] {
        for b in [-1.0, 0.0, 1.0] {
            for c in [-1.0, 0.0, 1.0] {
                if a != 0.0 || b != 0.0 || c != 0.0 {
                    candidates.push(Quaternion::imaginary(a, b, c).normalize());
                }
            }
        }
    }
    let margin = |r0: &Quaternion| rho.valid_values().map(|r| 1.0 + r0.dot(*r)).fold(f64::INFINITY, f64::min);
    let (rho0, m) =
        candidates.iter().map(|c| (*c, margin(c))).max_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty candidate set");
    if m < 1e-6 {
        return Err(Error::Antipodal);
    }
    let p0 = fiber_point_near(u, rho0, Quaternion::ONE)?;
    let mut out = rho.map(|_| Quaternion::ONE);
    for (i, j) in rho.valid.iter() {
        out.values[rho.domain.index(i, j)] = rotor_to(rho0, *rho.at(i, j))? * p0;
    }
    Ok(out)
}

/// First method: `R(1) = e1`, `R(u) = e2`, completed as `R(z) = p z p̄ e1`
/// for a smooth rotor `p` over `ρ_X`. The completion is `p e^{uφ}`, so `phi`
/// selects a different frame on the orthogonal plane.
pub fn lift_frame(imm: &Immersion, gd: &GaussData, ctx: &AlgebraContext, phi: f64) -> Result<LiftBundle> {
    let u = quat_ctx(ctx)?;
    let p = smooth_rotors(&gd.rho, u)?.map(|p| *p * Quaternion::exp_axis(u, phi));
    let x = imm.x.opened();
    let mut f = x.map(|_| DMatrix::<f64>::identity(5, 5));
    f.valid = x.valid.intersect(&p.valid).intersect(&gd.e1.valid);
    for (i, j) in f.valid.iter() {
        let k = x.domain.index(i, j);
        let q = p.values[k];
        let rot = gd.e1.values[k].right_matrix() * q.left_matrix() * q.conj().right_matrix();
        f.values[k] = homogeneous(&m4(rot), vec_to_quaternion(&x.values[k]).to_array().as_slice());
    }
    LiftBundle::new(f, build_tau(Group::So4, ctx)?, 0)
}

/// Second method: `R = L_p` with `p u p̄ = ρ_X`, continued along rows by
/// nearest fiber point.
pub fn lift_hopf(imm: &Immersion, gd: &GaussData, ctx: &AlgebraContext) -> Result<LiftBundle> {
    let u = quat_ctx(ctx)?;
    let (p, flags) = hopf_rotors(&gd.rho, u)?;
    let x = imm.x.opened();
    let f = p.zip_map(&x, |q, v| homogeneous(&m4(q.left_matrix()), vec_to_quaternion(v).to_array().as_slice()));
    LiftBundle::new(f, build_tau(Group::Spin3, ctx)?, flags)
}

/// Continuous `p` with `p u p̄ = ρ` on the open fundamental rectangle, and the
/// number of sign changes across periodic seams.
pub fn hopf_rotors(rho: &GridMap<Quaternion>, u: Quaternion) -> Result<(GridMap<Quaternion>, usize)> {
    let opened = rho.opened();
    let mut p = opened.map(|_| Quaternion::ONE);
    for ((i, j), prev) in row_major_order(opened.valid) {
        let k = opened.domain.index(i, j);
        let r = opened.values[k];
        p.values[k] = match prev {
            None => fiber_point_near(u, r, Quaternion::ONE)?,
            Some((a, b)) => fiber_point_near(u, r, *p.at(a, b))?,
        };
    }
    let v = opened.valid;
    let mut seams = 0;
    if rho.domain.periodic[0] && v.i0 == 0 && v.i1 == rho.domain.nx {
        seams += (v.j0..v.j1).filter(|&j| p.at(v.i1 - 1, j).dot(*p.at(0, j)) < 0.0).count();
    }
    if rho.domain.periodic[1] && v.j0 == 0 && v.j1 == rho.domain.ny {
        seams += (v.i0..v.i1).filter(|&i| p.at(i, v.j1 - 1).dot(*p.at(i, 0)) < 0.0).count();
    }
    Ok((p, seams))
}

/// U(2)-valued frame: `R(1) = e1`, `R(i) = i e1`, `R(j) = f`, `R(k) = i f`,
/// where `f` is `e2` made Hermitian-orthogonal to `e1`.
pub fn u2_frames(gd: &GaussData) -> GridMap<Matrix4<f64>> {
    gd.e1.zip_map(&gd.e2, |a, b| {
        let a = *a;
        let ia = Quaternion::I * a;
        let f = *b - a * a.dot(*b) - ia * ia.dot(*b);
        let f = if f.norm() > 1e-6 {
            f.normalize()
        } else {
            let (z1, z2) = a.to_c2();
            Quaternion::from_c2(-z2.conj(), z1.conj())
        };
        columns([a, ia, f, Quaternion::I * f])
    })
}

pub fn lift_u2(imm: &Immersion, gd: &GaussData, ctx: &AlgebraContext) -> Result<LiftBundle> {
    let x = imm.x.opened();
    let frames = u2_frames(gd).opened();
    let f = frames.zip_map(&x, |r, v| homogeneous(&m4(*r), vec_to_quaternion(v).to_array().as_slice()));
    LiftBundle::new(f, build_tau(Group::U2, ctx)?, 0)
}

/// `det_ℂ` of a U(2) frame in the coordinates `z1 + z2 j`.
pub fn complex_determinant(r: &Matrix4<f64>) -> Complex64 {
    let col = |k: usize| Quaternion::from_vector(&r.column(k).into_owned()).to_c2();
    let (z1, z2) = col(0);
    let (w1, w2) = col(2);
    z1 * w2 - z2 * w1
}

/// `F = (Id, X)`: translation only, generally not a lift.
pub fn identity_frame(imm: &Immersion, ctx: &AlgebraContext) -> Result<LiftBundle> {
    let x = imm.x.opened();
    let f = x.map(|v| homogeneous(&DMatrix::identity(4, 4), vec_to_quaternion(v).to_array().as_slice()));
    LiftBundle::new(f, build_tau(Group::So4, ctx)?, 0)
}

/// Rotation-only frame `F = (L_p, 0)`.
pub fn rotor_frame(p: &GridMap<Quaternion>, ctx: &AlgebraContext) -> Result<LiftBundle> {
    let f = p.opened().map(|q| homogeneous(&m4(q.left_matrix()), &[0.0; 4]));
    LiftBundle::new(f, build_tau(Group::Spin3, ctx)?, 0)
}

/// Octonionic second method: `R = L_m L_u` with `m = (u + ρ)/|u + ρ|`, an
/// element of Spin(7) with `R L_u R⁻¹ = L_ρ`.
pub fn lift_hopf_octonion(imm: &Immersion, ctx: &AlgebraContext) -> Result<LiftBundle> {
    let u = ctx.u_octonion();
    if ctx.dim != 8 {
        return Err(Error::MixedAlgebra(8, ctx.dim));
    }
    let (_, _, rho) = octonion_gauss(imm)?;
    let lu = u.left_matrix();
    let x = imm.x.opened();
    let mut f = x.map(|_| DMatrix::<f64>::identity(9, 9));
    f.valid = x.valid.intersect(&rho.valid);
    for (i, j) in f.valid.iter() {
        let k = x.domain.index(i, j);
        let s = u + rho.values[k];
        if s.norm() < 1e-8 {
            return Err(Error::Antipodal);
        }
        let m = s.normalize();
        let rot = m.left_matrix() * lu;
        let xv = vec_to_octonion(&x.values[k]);
        f.values[k] = homogeneous(&DMatrix::from_column_slice(8, 8, rot.as_slice()), &xv.0);
    }
    LiftBundle::new(f, build_tau(Group::Spin7, ctx)?, 0)
}

/// Octonionic Hopf map of the rotation part of a lift, per point.
pub fn octonion_hopf_of_bundle(b: &LiftBundle) -> Result<GridMap<Octonion>> {
    let u = b.tau.u.as_octonion();
    let mut out = b.f.map(|_| Octonion::ZERO);
    for (i, j) in b.f.valid.iter() {
        let m = b.f.at(i, j).view((0, 0), (8, 8)).into_owned();
        let m8 = crate::algebra::Matrix8::from_column_slice(m.as_slice());
        out.values[b.f.domain.index(i, j)] = crate::algebra::spin7_hopf_from_matrix(&m8, u)?.0;
    }
    Ok(out)
}

/// A smooth frame `F = (exp(A(x,y)), X(x,y))` with random coefficients, not a
/// lift of anything in particular.
pub fn random_smooth_frame(domain: GridDomain, group: Group, ctx: &AlgebraContext, seed: u64) -> Result<LiftBundle> {
    let tau = build_tau(group, ctx)?;
    let n = group.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rot_dim = tau.basis.len() - n;
    let mut coef =
        || -> Vec<f64> { (0..tau.basis.len()).map(|_| rng.sample::<f64, _>(StandardNormal) * 0.5).collect() };
    let (ca, cb, cc) = (coef(), coef(), coef());
    let basis = tau.basis.clone();
    let gen = move |c: &[f64], s: f64| {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (k, b) in basis.iter().enumerate().take(rot_dim) {
            m += b * (c[k] * s);
        }
        m
    };
    let trans = move |c: &[f64], s: f64| -> Vec<f64> { c[rot_dim..].iter().map(|v| v * s).collect() };
    let f = GridMap::from_fn(domain, |x, y| {
        let r = (gen(&ca, x).exp() * gen(&cb, y).exp() * gen(&cc, (x + 2.0 * y).sin()).exp())
            .view((0, 0), (n, n))
            .into_owned();
        let t: Vec<f64> = trans(&ca, x.cos())
            .iter()
            .zip(trans(&cb, (x * y).sin()))
            .zip(trans(&cc, y * y))
            .map(|((a, b), c)| a + b + c)
            .collect();
        homogeneous(&r, &t)
    });
    LiftBundle::new(f, tau, 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// `sup min_± |p ∓ e^{iβ/2}|` for the Hopf lift.
    pub u1_residual: f64,
    /// `sup |det_ℂ R − e^{iβ}|` for the U(2) frame.
    pub u2_residual: f64,
    /// Mean of `arg det_ℂ R − β`, wrapped to `(−π, π]`.
    pub det_offset: f64,
    /// `sup |R − R*|` between the U(2) frame and the first-method frame
    /// (both satisfy `R(1) = e1`, `R(j) = e2` on Lagrangian surfaces).
    pub u2_is_frame_lift: f64,
}

pub fn hsl_reduction_check(gd: &GaussData) -> Result<ReductionReport> {
    let beta = gd.beta()?;
    let (p, _) = hopf_rotors(&gd.rho, Quaternion::J)?;
    let frames = u2_frames(gd).opened();
    let mut u1: f64 = 0.0;
    let mut u2: f64 = 0.0;
    let mut offsets = Vec::new();
    let mut frame_gap: f64 = 0.0;
    for (i, j) in beta.valid.intersect(&p.valid).iter() {
        let b = *beta.at(i, j);
        let half = Quaternion::exp_axis(Quaternion::I, b / 2.0);
        let q = *p.at(i, j);
        u1 = u1.max((q - half).norm().min((q + half).norm()));
        let r = frames.at(i, j);
        let det = complex_determinant(r);
        u2 = u2.max((det - Complex64::from_polar(1.0, b)).norm());
        offsets
            .push((det.arg() - b + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI);
        let e2 = gd.e2.opened();
        let col2 = Quaternion::from_vector(&r.column(2).into_owned());
        frame_gap = frame_gap.max((col2 - *e2.at(i, j)).norm());
    }
    let det_offset = offsets.iter().sum::<f64>() / offsets.len().max(1) as f64;
    Ok(ReductionReport { u1_residual: u1, u2_residual: u2, det_offset, u2_is_frame_lift: frame_gap })
}
