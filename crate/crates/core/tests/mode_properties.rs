use num_complex::Complex64;
use proptest::prelude::*;

use vheat::mode_solver::{
    coefficients_closed_form, coefficients_from_linear_system, el_residual, mode_temperature, mode_temperature_rate,
    potential_initial_conditions, ModeInitialData, Stencil,
};
use vheat::model::{
    classify_regime, derive_mode_params, diffusive_rate, MaterialParams, ModeParams, Regime, DEFAULT_CRITICAL_EPS,
};

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Non-degenerate modes: ω/λ away from 1 on both sides.
fn generic_mode() -> impl Strategy<Value = ModeParams> {
    (0.1..10.0f64, prop_oneof![0.2..0.95f64, 1.05..5.0f64]).prop_map(|(lambda, ratio)| {
        ModeParams::from_rates(lambda, (ratio * lambda).powi(2), DEFAULT_CRITICAL_EPS).unwrap()
    })
}

fn any_mode() -> impl Strategy<Value = ModeParams> {
    prop_oneof![
        generic_mode(),
        (0.1..10.0f64, -0.9..0.9f64).prop_map(|(l, d)| {
            ModeParams::from_rates(l, l * l * (1.0 + d * DEFAULT_CRITICAL_EPS), DEFAULT_CRITICAL_EPS).unwrap()
        }),
        (0.1..10.0f64).prop_map(|l| ModeParams::from_rates(l, 0.0, DEFAULT_CRITICAL_EPS).unwrap()),
    ]
}

fn material() -> impl Strategy<Value = MaterialParams> {
    (0.5..5.0f64, 0.5..5.0f64, 0.05..5.0f64, 1e-3..2.0f64)
        .prop_map(|(rho, c_v, cond, tau)| MaterialParams::new(rho, c_v, cond, tau, 1.0).unwrap())
}

proptest! {
    #[test]
    fn rates_are_roots_of_the_characteristic_polynomial(mode in generic_mode()) {
        let (f, s) = (mode.fast_rate(), mode.slow_rate());
        let scale = mode.lambda * mode.lambda;
        prop_assert!(((f + s).re - 2.0 * mode.lambda).abs() <= 1e-12 * mode.lambda);
        prop_assert!((f * s - mode.omega_sq).norm() <= 1e-12 * scale.max(mode.omega_sq));
    }

    #[test]
    fn regime_follows_sign_of_discriminant(lambda in 0.1..10.0f64, omega_sq in 0.0..200.0f64) {
        let regime = classify_regime(lambda, omega_sq, DEFAULT_CRITICAL_EPS);
        let rel = (lambda * lambda - omega_sq) / (lambda * lambda);
        let expected = if omega_sq == 0.0 {
            Regime::ZeroMode
        } else if rel.abs() <= DEFAULT_CRITICAL_EPS {
            Regime::NearCritical
        } else if rel > 0.0 {
            Regime::Overdamped
        } else {
            Regime::Underdamped
        };
        prop_assert_eq!(regime, expected);
    }

    #[test]
    fn slow_rate_tends_to_diffusive_rate(m in material(), frac in 1e-3..0.1f64) {
        let k = frac * m.damping() / m.wave_speed();
        let mode = derive_mode_params(&m, k).unwrap();
        let a = diffusive_rate(&m, k);
        let ratio_sq = mode.omega_sq / (mode.lambda * mode.lambda);
        // λ − γ = αk² (1 + ω²/(4λ²) + …)
        prop_assert!(((mode.slow_rate().re - a) / a).abs() <= 0.26 * ratio_sq + 1e-12);
    }

    #[test]
    fn linear_system_eliminates_growing_branches(mode in generic_mode(), t0 in complex(), s0 in complex()) {
        let init = ModeInitialData::new(t0, s0);
        let state = potential_initial_conditions(&init, &mode).unwrap();
        let solved = coefficients_from_linear_system(&state, &mode).unwrap();
        let closed = coefficients_closed_form(&init, &mode).unwrap();
        let amax = solved.a1().norm().max(solved.a2().norm());
        prop_assert!(solved.b1().norm() <= 1e-10 * amax);
        prop_assert!(solved.b2().norm() <= 1e-10 * amax);
        prop_assert!((solved.a1() - closed.a1()).norm() <= 1e-10 * amax);
        prop_assert!((solved.a2() - closed.a2()).norm() <= 1e-10 * amax);
    }

    #[test]
    fn initial_values_are_reproduced(mode in any_mode(), t0 in complex(), s0 in complex()) {
        let init = ModeInitialData::new(t0, s0);
        let scale = t0.norm() + s0.norm() / mode.lambda;
        prop_assert!((mode_temperature(&init, &mode, 0.0).unwrap() - t0).norm() <= 1e-11 * scale);
        prop_assert!((mode_temperature_rate(&init, &mode, 0.0).unwrap() - s0).norm() <= 1e-11 * scale * mode.lambda);
    }

    #[test]
    fn real_data_gives_real_temperatures(mode in any_mode(), t0 in -1.0..1.0f64, s0 in -1.0..1.0f64, tl in 0.0..20.0f64) {
        let init = ModeInitialData::real(t0, s0);
        let t = tl / mode.lambda;
        let v = mode_temperature(&init, &mode, t).unwrap();
        prop_assert!(v.im.abs() <= 1e-12 * (t0.abs() + s0.abs() / mode.lambda + 1e-300));
    }

    #[test]
    fn overdamped_relaxation_is_monotone(lambda in 0.1..10.0f64, ratio in 0.05..0.95f64, t0 in 0.1..1.0f64) {
        let mode = ModeParams::from_rates(lambda, (ratio * lambda).powi(2), DEFAULT_CRITICAL_EPS).unwrap();
        let init = ModeInitialData::real(t0, 0.0);
        let mut prev = t0;
        for i in 1..=50 {
            let t = 0.2 * i as f64 / lambda;
            let v = mode_temperature(&init, &mode, t).unwrap().re;
            prop_assert!(v >= 0.0);
            prop_assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn oscillating_modes_stay_inside_envelope(lambda in 0.1..10.0f64, ratio in 1.0..20.0f64, t0 in complex(), s0 in complex(), tl in 0.0..30.0f64) {
        let mode = ModeParams::from_rates(lambda, (ratio * lambda).powi(2), DEFAULT_CRITICAL_EPS).unwrap();
        let init = ModeInitialData::new(t0, s0);
        let t = tl / lambda;
        let v = mode_temperature(&init, &mode, t).unwrap();
        let bound = (-lambda * t).exp() * (t0.norm() + t * (lambda * t0 + s0).norm());
        prop_assert!(v.norm() <= bound * (1.0 + 1e-9) + 1e-14);
    }

    #[test]
    fn near_critical_seam_is_continuous(lambda in 0.1..10.0f64, side in prop::bool::ANY, tl in 0.0..20.0f64) {
        let sign = if side { 1.0 } else { -1.0 };
        let inside = ModeParams::from_rates(lambda, lambda * lambda * (1.0 + sign * 0.99 * DEFAULT_CRITICAL_EPS), DEFAULT_CRITICAL_EPS).unwrap();
        let outside = ModeParams::from_rates(lambda, lambda * lambda * (1.0 + sign * 1.01 * DEFAULT_CRITICAL_EPS), DEFAULT_CRITICAL_EPS).unwrap();
        prop_assert_eq!(inside.regime, Regime::NearCritical);
        prop_assert_ne!(outside.regime, Regime::NearCritical);
        let init = ModeInitialData::real(1.0, -0.3 * lambda);
        let t = tl / lambda;
        let a = mode_temperature(&init, &inside, t).unwrap();
        let b = mode_temperature(&init, &outside, t).unwrap();
        prop_assert!((a - b).norm() <= 1e-6, "{a} vs {b}");
    }

    #[test]
    fn closed_form_satisfies_euler_lagrange(mode in generic_mode(), t0 in complex(), s0 in complex()) {
        let sol = coefficients_closed_form(&ModeInitialData::new(t0, s0), &mode).unwrap();
        let h = 0.02 / mode.fast_rate().norm();
        let grid: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 / mode.lambda).collect();
        // The residual is normalized by |ω⁴q|, while the stencil error scales
        // with the fast branch: (fast·h)⁴ relative to fast⁴ q.
        let stiffness = mode.fast_rate().norm().powi(4) / (mode.omega_sq * mode.omega_sq);
        prop_assert!(el_residual(&sol, &grid, h, Stencil::Fourth).unwrap() <= 1e-5 * stiffness);
    }
}

#[test]
fn zero_mode_needs_no_potential() {
    let mode = ModeParams::from_rates(2.0, 0.0, DEFAULT_CRITICAL_EPS).unwrap();
    let init = ModeInitialData::real(3.0, 0.0);
    assert!(potential_initial_conditions(&init, &mode).is_err());
    assert_eq!(mode_temperature(&init, &mode, 10.0).unwrap(), Complex64::new(3.0, 0.0));
}
