use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use hsl_lab::algebra::{matrix_to_rotor_pair, AlgebraContext, Octonion, Quaternion};
use hsl_lab::catalog::builtin;
use hsl_lab::gauss::{gauss_data, GaussData, GaussOptions, Immersion};
use hsl_lab::gridcalc::{convergence_order, GridDomain};
use hsl_lab::lift::*;
use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn surface(name: &str, n: usize) -> (Immersion, GaussData) {
    let imm = builtin(name).unwrap().immersion(n).unwrap();
    let gd = gauss_data(&imm, &GaussOptions::default()).unwrap();
    (imm, gd)
}

fn order_ok(levels: &[(f64, f64)]) -> bool {
    convergence_order(levels).unwrap().at_least(1.7)
}

fn study(name: &str, f: impl Fn(&Immersion, &GaussData) -> f64) -> Vec<(f64, f64)> {
    [32, 64, 128]
        .iter()
        .map(|&n| {
            let (imm, gd) = surface(name, n);
            (imm.x.domain.h(), f(&imm, &gd))
        })
        .collect()
}

fn rot(b: &LiftBundle, i: usize, j: usize) -> Matrix4<f64> {
    Matrix4::from_iterator(b.f.at(i, j).view((0, 0), (4, 4)).iter().copied())
}

fn q(m: &Matrix4<f64>, col: usize) -> Quaternion {
    Quaternion::from_vector(&m.column(col).into_owned())
}

#[test]
fn frame_lift_interpolates_and_recovers_rho() {
    let ctx = AlgebraContext::quaternionic();
    let (imm, gd) = surface("lagrangian_plane", 8);
    let b = lift_frame(&imm, &gd, &ctx, 0.0).unwrap();
    for (i, j) in b.f.valid.iter() {
        assert!((rot(&b, i, j) - Matrix4::identity()).abs().max() < 1e-14);
    }
    for name in ["clifford_torus", "lagrangian_catenoid", "cmc_cylinder", "round_sphere"] {
        let (imm, gd) = surface(name, 16);
        let b = lift_frame(&imm, &gd, &ctx, 0.0).unwrap();
        let e1 = gd.e1.opened();
        let e2 = gd.e2.opened();
        for (i, j) in b.f.valid.iter() {
            let r = rot(&b, i, j);
            assert!((q(&r, 0) - *e1.at(i, j)).norm() < 1e-12, "{name}");
            assert!((q(&r, 2) - *e2.at(i, j)).norm() < 1e-12, "{name}");
            assert!((r.transpose() * r - Matrix4::identity()).abs().max() < 1e-12);
            let rp = matrix_to_rotor_pair(&r).unwrap();
            let hopf = rp.p * Quaternion::J * rp.p.conj();
            assert!((hopf - *e2.at(i, j) * e1.at(i, j).conj()).norm() < 1e-10, "{name}");
        }
    }
}

#[test]
fn hopf_lift_of_plane_is_trivial() {
    let ctx = AlgebraContext::quaternionic();
    let (imm, gd) = surface("lagrangian_plane", 8);
    let b = lift_hopf(&imm, &gd, &ctx).unwrap();
    for (i, j) in b.f.valid.iter() {
        assert!((rot(&b, i, j) - Matrix4::identity()).abs().max() < 1e-14);
    }
    assert_eq!(lift_condition_residual(&b), 0.0);
}

#[test]
fn lift_condition_holds_for_both_methods() {
    let ctx = AlgebraContext::quaternionic();
    for name in ["lagrangian_plane", "clifford_torus", "lagrangian_catenoid"] {
        let a = study(name, |imm, gd| lift_condition_residual(&lift_frame(imm, gd, &ctx, 0.0).unwrap()));
        let b = study(name, |imm, gd| lift_condition_residual(&lift_hopf(imm, gd, &ctx).unwrap()));
        assert!(order_ok(&a), "{name} frame {a:?}");
        assert!(order_ok(&b), "{name} hopf {b:?}");
    }
}

#[test]
fn translation_only_frame_is_not_a_lift() {
    let ctx = AlgebraContext::quaternionic();
    let r = study("clifford_torus", |imm, _| lift_condition_residual(&identity_frame(imm, &ctx).unwrap()));
    assert!(r.iter().all(|v| v.1 > 0.1), "{r:?}");
    assert!((r[0].1 - r[2].1).abs() / r[2].1 < 0.05);
}

#[test]
fn u2_lift_detects_lagrangian() {
    let ctx = AlgebraContext::quaternionic();
    let (imm, gd) = surface("complex_line", 16);
    assert!(lift_condition_residual(&lift_u2(&imm, &gd, &ctx).unwrap()) > 0.1);
    let c = study("clifford_torus", |imm, gd| lift_condition_residual(&lift_u2(imm, gd, &ctx).unwrap()));
    assert!(order_ok(&c), "{c:?}");
}

#[test]
fn hsl_lifts_are_flat_for_every_lambda() {
    let ctx = AlgebraContext::quaternionic();
    let lambdas = [Complex64::from(1.0), Complex64::i(), Complex64::from_polar(1.0, PI / 5.0), Complex64::from(2.0)];
    for name in ["clifford_torus", "lagrangian_catenoid"] {
        for l in lambdas {
            let r = study(name, |imm, gd| flatness_residual(&lift_hopf(imm, gd, &ctx).unwrap(), l).unwrap());
            assert!(order_ok(&r), "{name} {l} {r:?}");
        }
    }
}

#[test]
fn harmonic_gauss_maps_give_flat_frame_lifts() {
    let ctx = AlgebraContext::quaternionic();
    let l = Complex64::from_polar(1.0, PI / 5.0);
    for name in ["cmc_cylinder", "round_sphere"] {
        let r = study(name, |imm, gd| flatness_residual(&lift_frame(imm, gd, &ctx, 0.0).unwrap(), l).unwrap());
        assert!(order_ok(&r), "{name} {r:?}");
    }
    let (imm, gd) = surface("torus_of_revolution", 64);
    assert!(flatness_residual(&lift_frame(&imm, &gd, &ctx, 0.0).unwrap(), l).unwrap() > 0.1);
}

#[test]
fn nonharmonic_rotor_curvature_scale() {
    let ctx = AlgebraContext::quaternionic();
    let entry = builtin("nonharmonic_rotor").unwrap();
    for grid in [64, 128] {
        let b = rotor_frame(&entry.rotor(grid).unwrap(), &ctx).unwrap();
        for phi in [0.3, FRAC_PI_4, 1.0] {
            let l = Complex64::from_polar(1.0, phi);
            let r = beta_flatness_residual(&b, l).unwrap();
            let expected = 4.0 * (2.0 * phi).sin().abs();
            assert!((r - expected).abs() < 1e-2 * expected, "φ={phi} {r} vs {expected}");
        }
        // at λ = i the deformed form is τ applied to α and stays flat
        assert!(beta_flatness_residual(&b, Complex64::i()).unwrap() < 1e-10);
    }
}

#[test]
fn curvature_split_identity_for_random_frames() {
    let ctx = AlgebraContext::quaternionic();
    for group in [Group::So4, Group::Spin3] {
        let levels: Vec<(f64, f64)> = [32, 64, 128]
            .iter()
            .map(|&n| {
                let d = GridDomain::rectangle(n + 1, n + 1, 0.0, 1.0, 0.0, 1.0, [false, false]).unwrap();
                let b = random_smooth_frame(d, group, &ctx, 7).unwrap();
                let r = curvature_split_residual(&b, Complex64::from(2.0)).unwrap();
                assert!(r.lhs > 0.1 && r.extra_minus > 1e-3, "{group:?} {r:?}");
                (d.hx, r.residual)
            })
            .collect();
        assert!(order_ok(&levels), "{group:?} {levels:?}");
    }
    let d = GridDomain::rectangle(17, 17, 0.0, 1.0, 0.0, 1.0, [false, false]).unwrap();
    let b = random_smooth_frame(d, Group::So4, &ctx, 3).unwrap();
    let r = curvature_split_residual(&b, Complex64::from(1.0)).unwrap();
    assert_eq!((r.extra_minus, r.extra_plus), (0.0, 0.0));
}

#[test]
fn curvature_split_extra_terms_vanish_for_lifts() {
    let ctx = AlgebraContext::quaternionic();
    let r = study("clifford_torus", |imm, gd| {
        let res = curvature_split_residual(&lift_hopf(imm, gd, &ctx).unwrap(), Complex64::from(2.0)).unwrap();
        res.extra_minus.max(res.extra_plus)
    });
    assert!(order_ok(&r), "{r:?}");
}

#[test]
fn decomposition_properties() {
    let ctx = AlgebraContext::quaternionic();
    let d = GridDomain::rectangle(9, 9, 0.0, 1.0, 0.0, 1.0, [false, false]).unwrap();
    let constant =
        hsl_lab::gridcalc::GridMap::from_fn(d, |_, _| homogeneous(&DMatrix::identity(4, 4), &[1.0, 2.0, 3.0, 4.0]));
    let b = LiftBundle::new(constant, build_tau(Group::So4, &ctx).unwrap(), 0).unwrap();
    assert!(b.components.z.iter().chain(b.components.zbar.iter()).all(|c| c.sup_norm() == 0.0));
    for seed in 0..3 {
        let b = random_smooth_frame(d, Group::So4, &ctx, seed).unwrap();
        assert!(b.reconstruction_defect() < 1e-12);
        assert!(b.conjugation_defect() < 1e-12);
    }
}

#[test]
fn grading_is_respected_by_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (group, ctx) in [
        (Group::Spin3, AlgebraContext::quaternionic()),
        (Group::So4, AlgebraContext::quaternionic()),
        (Group::Spin7, AlgebraContext::octonionic()),
    ] {
        let tau = build_tau(group, &ctx).unwrap();
        let mut random = || {
            let c: Vec<Complex64> =
                (0..tau.basis.len()).map(|_| Complex64::from(rng.random_range(-1.0..1.0))).collect();
            tau.from_coords(&c)
        };
        let (xi, eta) = (random(), random());
        let bracket = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
        assert!((tau.apply(&bracket(&xi, &eta)) - bracket(&tau.apply(&xi), &tau.apply(&eta))).norm() < 1e-12);
        for a in GRADES {
            for b in GRADES {
                let br = bracket(&tau.project(a, &xi), &tau.project(b, &eta));
                for c in GRADES {
                    if (a + b - c).rem_euclid(4) != 0 {
                        assert!(tau.project(c, &br).norm() < 1e-12, "{group:?} {a} {b} {c}");
                    }
                }
            }
        }
    }
}

#[test]
fn reductions_on_lagrangian_surfaces() {
    let (_, gd) = surface("clifford_torus", 32);
    let r = hsl_reduction_check(&gd).unwrap();
    assert!(r.u1_residual < 1e-8 && r.u2_residual < 1e-8, "{r:?}");
    assert!(r.det_offset.abs() < 1e-10 && r.u2_is_frame_lift < 1e-12);
    let (_, gd) = surface("lagrangian_catenoid", 16);
    let r = hsl_reduction_check(&gd).unwrap();
    assert!(r.u2_residual < 1e-12);
    let frames = u2_frames(&gd);
    assert!(frames.valid_values().all(|m| (complex_determinant(m) - Complex64::i()).norm() < 1e-12));
    let (_, gd) = surface("lagrangian_plane", 8);
    let r = hsl_reduction_check(&gd).unwrap();
    assert!(r.u1_residual < 1e-14 && r.u2_residual < 1e-14);
    let (_, gd) = surface("complex_line", 8);
    assert!(hsl_reduction_check(&gd).is_err());
    let _ = FRAC_PI_2;
}

#[test]
fn completion_spread_is_discretisation_sized() {
    let ctx = AlgebraContext::quaternionic();
    let l = Complex64::from(2.0);
    let spread = study("clifford_torus", |imm, gd| {
        let a = flatness_residual(&lift_frame(imm, gd, &ctx, 0.0).unwrap(), l).unwrap();
        let b = flatness_residual(&lift_frame(imm, gd, &ctx, 0.7).unwrap(), l).unwrap();
        (a - b).abs().max(a).max(b)
    });
    assert!(order_ok(&spread), "{spread:?}");
}

#[test]
fn octonionic_clifford_torus() {
    let ctx = AlgebraContext::octonionic();
    let levels: Vec<(f64, f64)> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let imm = builtin("octonion_clifford").unwrap().immersion(n).unwrap();
            let b = lift_hopf_octonion(&imm, &ctx).unwrap();
            let (_, _, rho) = hsl_lab::gauss::octonion_gauss(&imm).unwrap();
            let h = octonion_hopf_of_bundle(&b).unwrap();
            let rho = rho.opened();
            for (i, j) in b.f.valid.iter() {
                assert!((*h.at(i, j) - *rho.at(i, j)).norm() < 1e-10);
            }
            assert!(lift_condition_residual(&b) < 1e-2);
            (imm.x.domain.h(), flatness_residual(&b, Complex64::from_polar(1.0, PI / 5.0)).unwrap())
        })
        .collect();
    assert!(order_ok(&levels), "{levels:?}");
    let _ = Octonion::ZERO;
}
