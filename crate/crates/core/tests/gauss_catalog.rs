use std::f64::consts::FRAC_PI_2;

use hsl_lab::catalog::builtin;
use hsl_lab::gauss::{
    cmc_check, gauss_data, hsl_residual, lagrangian_residual, mean_curvature, special_lagrangian_check, GaussOptions,
};
use hsl_lab::gridcalc::{convergence_order, OrderEstimate};

fn data(name: &str, n: usize) -> (hsl_lab::gauss::Immersion, hsl_lab::gauss::GaussData) {
    let imm = builtin(name).unwrap().immersion(n).unwrap();
    let gd = gauss_data(&imm, &GaussOptions::default()).unwrap();
    (imm, gd)
}

#[test]
fn catenoid_is_special_lagrangian() {
    let (imm, gd) = data("lagrangian_catenoid", 32);
    assert!(lagrangian_residual(&imm).unwrap() < 1e-12);
    let beta = gd.beta().unwrap();
    assert!(beta.valid_values().all(|b| (b - FRAC_PI_2).abs() < 1e-12));
    assert!(special_lagrangian_check(&gd, 1e-10).unwrap().special);
    assert!(hsl_residual(&gd).unwrap().flat < 1e-10);
    let levels: Vec<(f64, f64)> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let (imm, gd) = data("lagrangian_catenoid", n);
            let mc = mean_curvature(&imm, &gd).unwrap();
            (imm.x.domain.h(), mc.sup_full_trace)
        })
        .collect();
    assert!(convergence_order(&levels).unwrap().at_least(1.7), "{levels:?}");
}

#[test]
fn mean_curvature_identity_converges_on_clifford_torus() {
    let levels: Vec<(f64, f64)> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let (imm, gd) = data("clifford_torus", n);
            (imm.x.domain.h(), mean_curvature(&imm, &gd).unwrap().identity_residual)
        })
        .collect();
    let p = convergence_order(&levels).unwrap().value().unwrap();
    assert!((p - 2.0).abs() < 0.3, "order {p}");
}

#[test]
fn defining_relation_is_second_order() {
    for name in ["clifford_torus", "lagrangian_catenoid", "cmc_cylinder", "round_sphere", "torus_of_revolution"] {
        let levels: Vec<(f64, f64)> = [32, 64]
            .iter()
            .map(|&n| {
                let (imm, gd) = data(name, n);
                (imm.x.domain.h(), gd.defining_relation)
            })
            .collect();
        assert!(convergence_order(&levels).unwrap().at_least(1.7), "{name} {levels:?}");
    }
}

#[test]
fn imaginary_surfaces_have_rho_equal_minus_sigma() {
    for name in ["cmc_cylinder", "round_sphere", "torus_of_revolution"] {
        let (imm, gd) = data(name, 32);
        assert!(cmc_check(&imm, &gd).unwrap().rho_plus_sigma < 1e-10, "{name}");
    }
}

#[test]
fn cmc_tension_orders() {
    for name in ["cmc_cylinder", "round_sphere"] {
        let levels: Vec<(f64, f64)> = [32, 64, 128]
            .iter()
            .map(|&n| {
                let (imm, gd) = data(name, n);
                (imm.x.domain.h(), cmc_check(&imm, &gd).unwrap().tension_sup)
            })
            .collect();
        assert!(convergence_order(&levels).unwrap().at_least(1.7), "{name} {levels:?}");
    }
    let (imm, gd) = data("round_sphere", 64);
    let r = cmc_check(&imm, &gd).unwrap();
    assert!(r.mean_curvature_spread < 1e-2, "{}", r.mean_curvature_spread);
}

#[test]
fn torus_of_revolution_is_a_negative_control() {
    let sups: Vec<(f64, f64)> = [32, 64]
        .iter()
        .map(|&n| {
            let (imm, gd) = data("torus_of_revolution", n);
            let r = cmc_check(&imm, &gd).unwrap();
            assert!(r.mean_curvature_spread > 0.1);
            (imm.x.domain.h(), r.tension_sup)
        })
        .collect();
    assert!(sups.iter().all(|s| s.1 > 0.05));
    match convergence_order(&sups).unwrap() {
        OrderEstimate::Order(p) => assert!(p.abs() < 0.2, "order {p}"),
        OrderEstimate::Exact => panic!("tension cannot vanish"),
    }
}
