use hsl_lab::algebra::{
    hopf_left, matrix_to_rotor_pair, plane_from_rho_sigma, rotor_pair_to_matrix, spin7_hopf, stiefel_rho_sigma,
    AlgebraContext, AlgebraElement, Octonion, Quaternion, Spin7Element,
};
use proptest::prelude::*;

fn quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-2.0..2.0f64).prop_map(Quaternion::from_array)
}

fn unit_quat() -> impl Strategy<Value = Quaternion> {
    quat().prop_filter("nonzero", |q| q.norm() > 0.1).prop_map(Quaternion::normalize)
}

fn oct() -> impl Strategy<Value = Octonion> {
    prop::array::uniform8(-2.0..2.0f64).prop_map(Octonion)
}

fn unit_imag_oct() -> impl Strategy<Value = Octonion> {
    oct().prop_map(|o| o.imag()).prop_filter("nonzero", |o| o.norm() > 0.1).prop_map(Octonion::normalize)
}

fn close_q(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).norm() <= tol
}

fn close_o(a: Octonion, b: Octonion, tol: f64) -> bool {
    (a - b).norm() <= tol
}

proptest! {
    #[test]
    fn quaternion_norm_is_multiplicative_and_product_associative(a in quat(), b in quat(), c in quat()) {
        prop_assert!((( a * b).norm() - a.norm() * b.norm()).abs() < 1e-12);
        prop_assert!(close_q((a * b) * c, a * (b * c), 1e-12));
        prop_assert!(close_q((a * b).conj(), b.conj() * a.conj(), 1e-12));
    }

    #[test]
    fn octonion_composition_alternativity_moufang(x in oct(), y in oct(), z in oct()) {
        prop_assert!(((x * y).norm() - x.norm() * y.norm()).abs() < 1e-11);
        prop_assert!(close_o((x * x) * y, x * (x * y), 1e-10));
        prop_assert!(close_o((y * x) * x, y * (x * x), 1e-10));
        prop_assert!(close_o(z * (x * (z * y)), ((z * x) * z) * y, 1e-9));
        prop_assert!(close_o((x * y).conj(), y.conj() * x.conj(), 1e-12));
    }

    #[test]
    fn rotor_pair_round_trip(p in unit_quat(), q in unit_quat()) {
        let rp = hsl_lab::algebra::RotorPair::new(p, q).unwrap();
        let m = rotor_pair_to_matrix(&rp).unwrap();
        let back = matrix_to_rotor_pair(&m).unwrap();
        prop_assert!(back.equivalent(&rp, 1e-9));
        let m2 = rotor_pair_to_matrix(&back).unwrap();
        prop_assert!((m - m2).abs().max() < 1e-12);
    }

    #[test]
    fn gauss_pair_invariant_under_in_plane_rotation(a in unit_quat(), b in quat(), t in -3.0..3.0f64) {
        // Gram–Schmidt a second vector against the first.
        let b = b - a * a.dot(b);
        prop_assume!(b.norm() > 0.1);
        let b = b.normalize();
        let pair = |e1: Quaternion, e2: Quaternion| {
            let (r, s) = stiefel_rho_sigma(&AlgebraElement::Quat(e1), &AlgebraElement::Quat(e2)).unwrap();
            (r.as_quaternion().unwrap(), s.unwrap().as_quaternion().unwrap())
        };
        let (r0, s0) = pair(a, b);
        let (c, s) = (t.cos(), t.sin());
        let (r1, s1) = pair(a * c + b * s, a * (-s) + b * c);
        prop_assert!(close_q(r0, r1, 1e-12));
        prop_assert!(close_q(s0, s1, 1e-12));
        prop_assert!(r0.real().abs() < 1e-12 && (r0.norm() - 1.0).abs() < 1e-12);
        // and the plane is recovered up to in-plane rotation
        let (f1, f2) = plane_from_rho_sigma(r0, s0).unwrap();
        let (r2, s2) = pair(f1, f2);
        prop_assert!(close_q(r0, r2, 1e-9) && close_q(s0, s2, 1e-9));
    }

    #[test]
    fn hopf_is_constant_on_fibers(p in unit_quat(), t in -3.0..3.0f64) {
        let ctx = AlgebraContext::quaternionic();
        let u = ctx.u_quaternion();
        let w0 = hopf_left(p, &ctx).unwrap();
        let w1 = hopf_left(p * Quaternion::exp_axis(u, t), &ctx).unwrap();
        prop_assert!(close_q(w0, w1, 1e-12));
        prop_assert!(w0.real().abs() < 1e-12 && (w0.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spin7_hopf_equivariance(gens in prop::collection::vec(unit_imag_oct(), 0..5), v in unit_imag_oct()) {
        let ctx = AlgebraContext::octonionic();
        let p = Spin7Element::from_generators(&gens).unwrap();
        let w = spin7_hopf(&p, &ctx).unwrap();
        prop_assert!((w.norm() - 1.0).abs() < 1e-10 && w.real().abs() < 1e-10);
        let lv = Spin7Element::from_generators(&[v]).unwrap();
        let w2 = spin7_hopf(&lv.compose(&p), &ctx).unwrap();
        prop_assert!(close_o(w2, -(v * w * v), 1e-9));
    }
}
