//! Closed-form and quadrature checks of the lattice, profiles and diagnostics.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use mnls_core::{
    ground_state_1d, make_grid, pseudo_conformal_field, sample_diagnostics, sech_profile_2d, spectral_gradient,
    Complex64, ComplexField, PseudoConformalSpec,
};
use proptest::prelude::*;

// Frozen from 30-digit adaptive quadrature of Q(x) = (3/16)^{1/4} 2/sqrt(cosh 2x).
const MASS_Q: f64 = 2.720_699_046_351_327;
const VARIANCE_Q: f64 = 1.678_263_955_119_292_2;
const SEXTIC_Q: f64 = 4.081_048_569_526_99;
const KINETIC_Q: f64 = 1.360_349_523_175_663_4;
const SECH_2D_MASS: f64 = 80.527_133_619_427_2;

#[test]
fn ground_state_quadrature() {
    let g = make_grid(1, 12.0 * PI, 2048).unwrap();
    let s = sample_diagnostics(&ground_state_1d(1.0, &g).unwrap(), -1.0, 5.0);
    assert_relative_eq!(s.mass, MASS_Q, max_relative = 1e-12);
    assert_relative_eq!(s.variance, VARIANCE_Q, max_relative = 1e-10);
    assert_relative_eq!(s.potential, SEXTIC_Q, max_relative = 1e-12);
    assert_relative_eq!(s.kinetic, KINETIC_Q, max_relative = 1e-10);
}

#[test]
fn sech_mass_quadrature() {
    let g = make_grid(2, 6.0 * PI, 256).unwrap();
    let u = sech_profile_2d(5.0, 0.86, &g).unwrap();
    assert_relative_eq!(u.norm_sq(), SECH_2D_MASS, max_relative = 1e-9);
    assert_relative_eq!(mnls_core::profiles::sech_profile_2d_mass(5.0, 0.86), SECH_2D_MASS, max_relative = 1e-14);
}

#[test]
fn pseudo_conformal_closed_forms() {
    // Wide box so that the slowly decaying T = 5 profile is not truncated.
    let g = make_grid(1, 48.0 * PI, 8192).unwrap();
    for t_blow in [1.1, 1.5, 5.0] {
        for time in [0.0, 0.5 * t_blow] {
            for conjugate in [false, true] {
                let spec = PseudoConformalSpec {
                    time,
                    conjugate,
                    ..PseudoConformalSpec::at_origin(t_blow, 1.0, false)
                };
                let s = sample_diagnostics(&pseudo_conformal_field(&spec, &g).unwrap(), -1.0, 5.0);
                assert_relative_eq!(s.mass, MASS_Q, max_relative = 1e-8);
                assert_relative_eq!(s.variance, spec.variance(), max_relative = 1e-6);
                assert_relative_eq!(s.virial, spec.virial(), max_relative = 1e-6);
                assert_relative_eq!(s.energy, spec.focusing_energy(), max_relative = 1e-6);
                assert_relative_eq!(s.linf, spec.peak(), max_relative = 1e-3);
            }
        }
    }
}

#[test]
fn frozen_values_at_t_one_and_a_half() {
    let g = make_grid(1, 12.0 * PI, 2048).unwrap();
    let spec = PseudoConformalSpec::at_origin(1.5, 1.0, false);
    let s = sample_diagnostics(&pseudo_conformal_field(&spec, &g).unwrap(), -1.0, 5.0);
    assert_relative_eq!(s.variance, 3.776_093_899, max_relative = 1e-6);
    assert_relative_eq!(s.virial, 1.258_697_966, max_relative = 1e-6);
    assert_relative_eq!(s.energy, 0.209_782_994, max_relative = 1e-6);
    assert_relative_eq!(s.linf, 1.074_569_9, max_relative = 1e-6);
}

#[test]
fn scaled_ground_state_energy_and_variance() {
    let g = make_grid(1, 12.0 * PI, 2048).unwrap();
    let q2 = ground_state_1d(2.0, &g).unwrap();
    let s = sample_diagnostics(&q2, -1.0, 5.0);
    assert_relative_eq!(s.variance, VARIANCE_Q / 4.0, max_relative = 1e-9);
    assert_relative_eq!(s.kinetic, 4.0 * KINETIC_Q, max_relative = 1e-9);
}

#[test]
fn gradient_of_real_even_field_is_real_and_odd() {
    let g = make_grid(1, 12.0 * PI, 512).unwrap();
    let q = ground_state_1d(1.0, &g).unwrap();
    let d = &spectral_gradient(&q)[0];
    let n = g.points();
    let v = d.values();
    for i in 0..n {
        assert!(v[i].im.abs() < 1e-12);
        assert!((v[i] + v[(n - i) % n]).norm() < 1e-12);
    }
}

fn arb_field(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| Complex64::new(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval_1d(values in arb_field(64), l in 0.5f64..20.0) {
        let g = make_grid(1, l, 64).unwrap();
        let u = ComplexField::new(&g, values, 0.0).unwrap();
        let spectral: f64 = u.to_spectral().iter().map(|c| c.norm_sqr()).sum::<f64>() * g.spectral_weight();
        prop_assert!((spectral - u.norm_sq()).abs() <= 1e-12 * u.norm_sq().max(1e-300));
    }

    #[test]
    fn parseval_2d(values in arb_field(256), l in 0.5f64..20.0) {
        let g = make_grid(2, l, 16).unwrap();
        let u = ComplexField::new(&g, values, 0.0).unwrap();
        let spectral: f64 = u.to_spectral().iter().map(|c| c.norm_sqr()).sum::<f64>() * g.spectral_weight();
        prop_assert!((spectral - u.norm_sq()).abs() <= 1e-12 * u.norm_sq().max(1e-300));
    }

    #[test]
    fn spectral_round_trip(values in arb_field(256), time in 0.0f64..3.0) {
        for (dim, n) in [(1, 256), (2, 16)] {
            let g = make_grid(dim, 3.0, n).unwrap();
            let u = ComplexField::new(&g, values.clone(), time).unwrap();
            let back = ComplexField::from_spectral(&g, u.to_spectral(), time).unwrap();
            let scale = u.linf().max(1e-300);
            for (a, b) in u.values().iter().zip(back.values()) {
                prop_assert!((a - b).norm() <= 1e-13 * scale * 10.0);
            }
        }
    }

    #[test]
    fn mass_is_scale_invariant(omega in 0.5f64..3.0) {
        let g = make_grid(1, 12.0 * PI, 2048).unwrap();
        let q = ground_state_1d(omega, &g).unwrap();
        prop_assert!((q.norm_sq() - MASS_Q).abs() < 1e-9);
    }
}
