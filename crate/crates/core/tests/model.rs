use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use viscous_waves::model::{linear_symbol, nonlinear_rhs_full, nonlinear_rhs_simplified, rhs};
use viscous_waves::oracle::{self, cosine_mode, relative_error};
use viscous_waves::{Grid, ModelParams, SpectralField, Variant, WaveState};

fn random_state(seed: u64, amplitude: f64) -> WaveState {
    let grid = Grid::new(64).unwrap();
    oracle::random_state(&grid, &mut ChaCha8Rng::seed_from_u64(seed), amplitude)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn simplified_rhs_on_two_modes_matches_oracle(a in -1.0f64..1.0, b in -1.0f64..1.0, delta in 0.0f64..0.5, beta in 0.0f64..0.2) {
        let grid = Grid::new(64).unwrap();
        let s = WaveState::new(
            cosine_mode(&grid, 1, a, 0.0),
            cosine_mode(&grid, 1, b, -std::f64::consts::FRAC_PI_2),
            0.0,
        ).unwrap();
        let p = ModelParams::simplified(delta, beta, 1.0);
        let fast = nonlinear_rhs_simplified(&s, &p).unwrap();
        prop_assert!(fast.max_abs_diff(&oracle::nonlinear_rhs_simplified(&s, &p)) < 1e-11);
    }

    #[test]
    fn simplified_rhs_on_random_states_matches_oracle(seed in any::<u64>(), delta in 0.0f64..0.5, eps in 0.0f64..1.0) {
        let s = random_state(seed, 1.0);
        let p = ModelParams::simplified(delta, 0.01, eps);
        let fast = nonlinear_rhs_simplified(&s, &p).unwrap();
        prop_assert!(relative_error(&fast, &oracle::nonlinear_rhs_simplified(&s, &p)) < 1e-11);
    }

    #[test]
    fn full_minus_simplified_is_the_two_extra_terms(seed in any::<u64>(), delta in 0.0f64..0.5, beta in 0.0f64..0.1) {
        let s = random_state(seed, 1.0);
        let simplified = ModelParams::simplified(delta, beta, 0.7);
        let full = ModelParams::full(delta, beta, 0.7, delta, delta);
        let diff = &nonlinear_rhs_full(&s, &full).unwrap() - &nonlinear_rhs_simplified(&s, &simplified).unwrap();
        prop_assert!(relative_error(&diff, &oracle::full_model_extra_terms(&s, &simplified)) < 1e-12);
    }

    #[test]
    fn rhs_is_real_mean_free_and_quadratic(seed in any::<u64>(), lambda in -3.0f64..3.0, full in any::<bool>()) {
        let s = random_state(seed, 1.0);
        let p = if full {
            ModelParams::full(0.1, 0.01, 1.0, 0.05, 0.3)
        } else {
            ModelParams::simplified(0.1, 0.01, 1.0)
        };
        let n = rhs(&s, &p).unwrap();
        prop_assert_eq!(n.coeff(0).norm(), 0.0);
        prop_assert!(n.is_real());
        let scaled = rhs(&s.scaled(lambda), &p).unwrap();
        prop_assert!(relative_error(&scaled, &n.scale(lambda * lambda)) < 1e-12);
    }
}

#[test]
fn trivial_inputs() {
    let grid = Grid::new(32).unwrap();
    let zero = WaveState::zeros(&grid);
    for p in [
        ModelParams::simplified(0.1, 0.1, 1.0),
        ModelParams::full(0.1, 0.1, 1.0, 0.2, 0.3),
        ModelParams::linear(0.1, 0.1),
    ] {
        assert_eq!(rhs(&zero, &p).unwrap().max_abs(), 0.0);
    }
    let s = random_state(4, 1.0);
    assert_eq!(rhs(&s, &ModelParams::linear(0.1, 0.1)).unwrap().max_abs(), 0.0);
}

#[test]
fn only_the_ft_term_survives_without_f() {
    let grid = Grid::new(64).unwrap();
    let s = random_state(11, 1.0);
    let moving = WaveState::new(SpectralField::zeros(&grid), s.ft().clone(), 0.0).unwrap();
    let p = ModelParams::simplified(0.2, 0.05, 1.0);
    let a = nonlinear_rhs_simplified(&moving, &p).unwrap();
    let b = nonlinear_rhs_full(&moving, &p.with_variant(Variant::Full)).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-15);
    let expect = {
        let h = oracle::hilbert(moving.ft());
        oracle::lambda_pow(&oracle::truncated_convolution(&h, &h), 1.0).scale(-1.0)
    };
    assert!(relative_error(&a, &expect) < 1e-13);
}

#[test]
fn linear_symbol_examples() {
    let zero = linear_symbol(0, &ModelParams::simplified(0.3, 0.2, 1.0));
    assert_eq!((zero.damping, zero.stiffness), (0.0, 0.0));

    let s = linear_symbol(1, &ModelParams::simplified(0.1, 0.0, 1.0));
    assert!((s.damping - 0.2).abs() < 1e-16);
    assert!((s.stiffness - 1.01).abs() < 1e-15);
    let f = linear_symbol(1, &ModelParams::full(0.1, 0.0, 1.0, 0.1, 0.1));
    assert_eq!((s.damping, s.stiffness), (f.damping, f.stiffness));

    let inviscid = linear_symbol(2, &ModelParams::simplified(0.0, 1.0, 1.0));
    assert_eq!((inviscid.damping, inviscid.stiffness), (0.0, 10.0));
}

#[test]
fn parameter_validation() {
    assert!(ModelParams::simplified(-0.1, 0.0, 1.0).validate().is_err());
    assert!(ModelParams::simplified(0.1, f64::NAN, 1.0).validate().is_err());
    assert!(ModelParams::full(0.1, 0.0, 1.0, -1.0, 0.1).validate().is_err());
    let mut p = ModelParams::simplified(0.1, 0.0, 1.0);
    p.alpha1 = 0.2;
    assert!(p.validate().is_err());
    assert!(ModelParams::ocean_regime().validate().is_ok());
    let preset = ModelParams::ocean_regime();
    assert_eq!((preset.delta, preset.beta, preset.epsilon), (1e-4, 1e-5, 1e-2));
    assert_eq!((preset.alpha1, preset.alpha2), (1e-4, 1e-4));
}

#[test]
fn states_are_validated() {
    let a = SpectralField::zeros(&Grid::new(16).unwrap());
    let b = SpectralField::zeros(&Grid::new(32).unwrap());
    assert!(WaveState::new(a.clone(), b, 0.0).is_err());

    let grid = Grid::new(16).unwrap();
    let mut coeffs = vec![num_complex::Complex64::new(0.0, 0.0); 16];
    coeffs[1] = num_complex::Complex64::new(1.0, 0.0);
    assert!(SpectralField::from_coeffs(&grid, coeffs).is_err());

    let shifted = &cosine_mode(&grid, 1, 1.0, 0.0)
        + &SpectralField::from_modes(&grid, &[(0, num_complex::Complex64::new(2.0, 0.0))]).unwrap();
    let s = WaveState::new(shifted, a, 0.0).unwrap();
    assert_eq!(s.f().mean(), 0.0);
}
