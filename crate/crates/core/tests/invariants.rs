use beamspec::asymptotics::{psi0, psi1_direct, psi1_via_transform};
use beamspec::coefficients::{build_beam, normalize_beam, Function1D};
use beamspec::determinant::{
    char_det, char_det_free, eb_char_det, BoundaryCondition, FourthOrderOperator,
};
use beamspec::inverse::{ambarzumyan_check, forward_derivatives, recover_alpha, recover_beta};
use beamspec::perturbation::g_kernel;
use beamspec::transform::{check_idp1, gottlieb_transform};
use beamspec::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn fourier() -> impl Strategy<Value = Function1D> {
    (
        -0.3..0.3f64,
        prop::collection::vec(-0.3..0.3f64, 2),
        prop::collection::vec(-0.3..0.3f64, 2),
    )
        .prop_map(|(c, a, b)| Function1D::fourier(c, a, b))
}

fn lambda() -> impl Strategy<Value = Complex64> {
    (0.5..12.0f64, 0.0..(2.0 * PI)).prop_map(|(r, th)| Complex64::from_polar(r, th).powu(4))
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn real_operators_have_conjugate_symmetric_determinants(p in fourier(), q in fourier(), l in lambda()) {
        let op = FourthOrderOperator::new(p, q);
        let a = char_det(&op, l).unwrap().unscaled();
        let b = char_det(&op, l.conj()).unwrap().unscaled();
        prop_assert!(rel_diff(b, a.conj()) < 1e-10);
    }

    #[test]
    fn zero_operator_matches_closed_form(l in lambda()) {
        let d = char_det(&FourthOrderOperator::zero(), l).unwrap().unscaled();
        prop_assert!(rel_diff(d, char_det_free(l)) < 1e-9);
    }

    #[test]
    fn constant_q_shifts_the_spectral_parameter(c in -5.0..5.0f64, l in lambda()) {
        let op = FourthOrderOperator::new(Function1D::zero(), Function1D::constant(c));
        let d = char_det(&op, l).unwrap().unscaled();
        prop_assert!(rel_diff(d, char_det_free(l - c)) < 1e-9);
    }

    #[test]
    fn uniform_beam_pinned_determinant_is_free(l in lambda()) {
        let d = eb_char_det(&normalize_beam(&build_beam(Function1D::zero(), Function1D::zero(), Function1D::zero(), 1.0).unwrap()), l, BoundaryCondition::PinnedPinned)
            .unwrap()
            .unscaled();
        let d0 = char_det_free(l);
        // the beam determinant may differ from the free one by a constant factor
        let d_ref = eb_char_det(&build_beam(Function1D::zero(), Function1D::zero(), Function1D::zero(), 1.0).unwrap(), Complex64::new(10.0, 3.0), BoundaryCondition::PinnedPinned)
            .unwrap()
            .unscaled()
            / char_det_free(Complex64::new(10.0, 3.0));
        prop_assert!(rel_diff(d, d0 * d_ref) < 1e-9);
    }

    #[test]
    fn normalization_fixes_arc_length_and_psi0_is_scale_free(alpha in fourier(), beta in fourier(), b0 in 0.3..3.0f64) {
        let beam = build_beam(alpha.clone(), beta.clone(), Function1D::zero(), b0).unwrap();
        let n = normalize_beam(&beam);
        prop_assert!((n.xi_integral() - 1.0).abs() < 1e-12);
        let other = normalize_beam(&build_beam(alpha, beta, Function1D::zero(), 1.0).unwrap());
        prop_assert!((psi0(&n).unwrap() - psi0(&other).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn transform_identities_hold(alpha in fourier(), beta in fourier(), q in fourier()) {
        let beam = normalize_beam(&build_beam(alpha, beta, q, 1.0).unwrap());
        prop_assert!(check_idp1(&beam).unwrap() < 1e-8);
        let op = gottlieb_transform(&beam).unwrap();
        prop_assert!((psi1_direct(&beam).unwrap() - psi1_via_transform(&op).unwrap()).abs() < 1e-6);
        prop_assert!((op.p_hat_0.re + psi0(&beam).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn g_kernel_is_symmetric_and_vanishes_at_ends(x in 0.0..1.0f64, l in lambda()) {
        let g = g_kernel(x, l);
        let scale = 1.0 + g.norm();
        prop_assert!((g - g_kernel(1.0 - x, l)).norm() < 1e-10 * scale);
        prop_assert!(g_kernel(0.0, l).norm() < 1e-10 * (1.0 + g_kernel(0.5, l).norm()));
    }

    #[test]
    fn inverse_maps_round_trip(s in prop::collection::vec(-1.0..1.0f64, 6), t in prop::collection::vec(-1.0..1.0f64, 6)) {
        let alpha = Function1D::fourier(0.0, vec![], s);
        let beta = Function1D::fourier(0.0, vec![], t);
        let derivs = forward_derivatives(&alpha, &beta, 6);
        let rb = recover_beta(&alpha, &derivs, 6).unwrap();
        let ra = recover_alpha(&beta, &derivs, 6).unwrap();
        for k in 0..=50 {
            let x = k as f64 / 50.0;
            prop_assert!((rb.recovered.eval(x) - beta.eval(x)).abs() < 1e-10);
            prop_assert!((ra.recovered.eval(x) - alpha.eval(x)).abs() < 1e-10);
        }
        prop_assert!(rb.residual_norm < 1e-8);
    }

    #[test]
    fn shifted_free_spectrum_is_not_uniform(shift in 0.5..5.0f64) {
        let spectrum: Vec<(usize, f64)> = (1..=16).map(|n| {
            let k = PI * n as f64;
            (n, k.powi(4) + 2.0 * k * k * shift)
        }).collect();
        let r = ambarzumyan_check(&spectrum, true).unwrap();
        prop_assert_eq!(r.is_uniform, Some(false));
        prop_assert!((r.psi0_est - shift).abs() < 1e-8 * shift.max(1.0));
    }
}
