use num_complex::Complex64;
use proptest::prelude::*;
use rmcurve_core::curve::CurveSpec;
use rmcurve_core::rh::{airy_kernel, model_rh_matrix, sine_kernel, verify_model_rh};

#[test]
fn airy_diagonal_is_positive_up_to_two() {
    for j in 0..=240 {
        let u = -10.0 + j as f64 * 0.05;
        let k = airy_kernel(u, u);
        assert!(k > 0.0, "K({u}, {u}) = {k}");
    }
}

#[test]
fn airy_diagonal_is_the_limit_of_the_off_diagonal() {
    for u in [-4.0, -1.0, 0.0, 1.5] {
        let near = airy_kernel(u, u + 1e-4);
        assert!((near - airy_kernel(u, u)).abs() < 1e-4, "u = {u}");
    }
}

#[test]
fn model_solution_is_reproducible() {
    let spec = CurveSpec::from_pairs(&[-3.0, 0.0, 3.0], &[(1, 3), (1, 3), (1, 3)]).unwrap();
    let a = verify_model_rh(&spec, 20).unwrap();
    let b = verify_model_rh(&spec, 20).unwrap();
    assert_eq!(a, b);
    assert!(a.max_residual < 1e-7, "{}", a.max_residual);
}

#[test]
fn model_solution_tends_to_identity() {
    let spec = CurveSpec::from_pairs(&[-2.0, 2.0], &[(1, 2), (1, 2)]).unwrap();
    let far = model_rh_matrix(&spec, Complex64::new(300.0, 400.0)).unwrap();
    let nearer = model_rh_matrix(&spec, Complex64::new(30.0, 40.0)).unwrap();
    assert!(far.distance_from_identity() < nearer.distance_from_identity());
    assert!(far.distance_from_identity() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sine_kernel_is_symmetric_and_bounded(u in -20.0f64..20.0, v in -20.0f64..20.0) {
        let k = sine_kernel(u, v);
        prop_assert_eq!(k.to_bits(), sine_kernel(v, u).to_bits());
        prop_assert!(k.abs() <= 1.0);
        if (u - v).abs() > 1e-3 {
            prop_assert!(k.abs() < 1.0);
        }
    }

    #[test]
    fn airy_kernel_is_symmetric(u in -8.0f64..4.0, v in -8.0f64..4.0) {
        let (a, b) = (airy_kernel(u, v), airy_kernel(v, u));
        prop_assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
    }
}
