use num_complex::Complex64;
use std::f64::consts::PI;

use vheat::fd_oracle::{fd_solve, fd_solve_samples, OracleConfig, TimeScheme};
use vheat::mode_solver::{mode_temperature, ModeInitialData};
use vheat::model::{derive_mode_params, diffusive_rate, MaterialParams};
use vheat::profile::PiecewiseProfile;
use vheat::spectral_field::FieldSnapshot;
use vheat::Error;

fn unit_material(tau: f64) -> MaterialParams {
    MaterialParams::new(1.0, 1.0, 1.0, tau, 1.0).unwrap()
}

/// `cos(2πx) + 0.5 sin(4πx)` evolved exactly, mode by mode.
fn exact(material: &MaterialParams, x: f64, t: f64) -> f64 {
    let amp = |k: f64, t0: f64| {
        let mode = derive_mode_params(material, k).unwrap();
        mode_temperature(&ModeInitialData::real(t0, 0.0), &mode, t).unwrap().re
    };
    amp(2.0 * PI, 1.0) * (2.0 * PI * x).cos() + 0.5 * amp(4.0 * PI, 1.0) * (4.0 * PI * x).sin()
}

fn run_smooth(material: &MaterialParams, n: usize, dt: f64, scheme: TimeScheme, t: f64) -> FieldSnapshot {
    let xs: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    let temps: Vec<f64> = xs.iter().map(|&x| exact(material, x, 0.0)).collect();
    let cfg = OracleConfig { n_cells: n, dt, scheme };
    fd_solve_samples(material, &temps, &vec![0.0; n], &cfg, &[t]).unwrap().remove(0)
}

fn max_error(material: &MaterialParams, s: &FieldSnapshot) -> f64 {
    s.xs.iter().zip(&s.temps).map(|(&x, v)| (v - exact(material, x, s.t)).abs()).fold(0.0, f64::max)
}

#[test]
fn spatial_refinement_is_second_order() {
    let m = unit_material(1e-3);
    let errs: Vec<f64> =
        [32, 64, 128].iter().map(|&n| max_error(&m, &run_smooth(&m, n, 1e-6, TimeScheme::Trapezoidal, 0.01))).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..2.3).contains(&order), "{errs:?}");
    }
}

#[test]
fn time_refinement_is_second_order() {
    let m = unit_material(1e-3);
    let reference = run_smooth(&m, 128, 1e-6, TimeScheme::Trapezoidal, 0.02);
    let diffs: Vec<f64> = [4e-4, 2e-4, 1e-4]
        .iter()
        .map(|&dt| {
            let s = run_smooth(&m, 128, dt, TimeScheme::Trapezoidal, 0.02);
            s.temps.iter().zip(&reference.temps).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        })
        .collect();
    for w in diffs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.7, "{diffs:?}");
    }
}

#[test]
fn schemes_agree_in_wave_regime() {
    // ω/λ ≈ 12.6 for the first mode: underdamped, oscillating.
    let m = unit_material(1.0);
    let n = 256;
    let dt = 0.5 / n as f64;
    let lf = run_smooth(&m, n, dt, TimeScheme::Leapfrog, 0.7);
    let tr = run_smooth(&m, n, dt, TimeScheme::Trapezoidal, 0.7);
    assert!(max_error(&m, &lf) < 2e-3, "{}", max_error(&m, &lf));
    assert!(max_error(&m, &tr) < 2e-3, "{}", max_error(&m, &tr));
}

#[test]
fn smaller_relaxation_time_approaches_fourier() {
    let fourier_gap = |tau: f64| {
        let m = unit_material(tau);
        let s = run_smooth(&m, 256, 1e-5, TimeScheme::Trapezoidal, 0.02);
        let rate = diffusive_rate(&m, 2.0 * PI);
        let rate2 = diffusive_rate(&m, 4.0 * PI);
        s.xs.iter()
            .zip(&s.temps)
            .map(|(&x, v)| {
                let f = (-rate * s.t).exp() * (2.0 * PI * x).cos() + 0.5 * (-rate2 * s.t).exp() * (4.0 * PI * x).sin();
                (v - f).abs()
            })
            .fold(0.0, f64::max)
    };
    let coarse = fourier_gap(1e-3);
    let fine = fourier_gap(1e-4);
    assert!(fine < 0.2 * coarse, "{coarse} {fine}");
}

#[test]
fn explicit_scheme_enforces_step_limit() {
    let m = unit_material(1.0);
    let limit = OracleConfig { n_cells: 128, dt: 1.0, scheme: TimeScheme::Leapfrog }.explicit_step_limit(&m);
    let bad = OracleConfig { n_cells: 128, dt: 0.91 * limit, scheme: TimeScheme::Leapfrog };
    let err = fd_solve(&m, &PiecewiseProfile::uniform(1.0, 1.0).unwrap(), &bad, &[0.1]).unwrap_err();
    assert!(matches!(err, Error::Stability(_)), "{err}");
    let ok = OracleConfig { dt: 0.9 * limit, ..bad };
    assert!(fd_solve(&m, &PiecewiseProfile::uniform(1.0, 1.0).unwrap(), &ok, &[0.1]).is_ok());
}

#[test]
fn mean_is_conserved_for_both_schemes() {
    let profile = PiecewiseProfile::silicon_bar();
    let silicon = MaterialParams::silicon();
    let wave = unit_material(1.0);
    let runs = [
        (silicon, OracleConfig { n_cells: 512, dt: 1e-2, scheme: TimeScheme::Trapezoidal }, 30.0),
        (wave, OracleConfig { n_cells: 512, dt: 1e-3, scheme: TimeScheme::Leapfrog }, 3.0),
    ];
    for (material, cfg, t_end) in runs {
        for s in fd_solve(&material, &profile, &cfg, &[0.0, 0.5 * t_end, t_end]).unwrap() {
            let mean = s.temps.iter().sum::<f64>() / s.temps.len() as f64;
            assert!((mean - 11.5).abs() < 1e-10, "{:?} t={}: {mean}", cfg.scheme, s.t);
        }
    }
}

#[test]
fn snapshots_match_requested_times() {
    let cfg = OracleConfig { n_cells: 64, dt: 0.3, scheme: TimeScheme::Trapezoidal };
    let times = [0.0, 0.45, 1.0];
    let snaps = fd_solve(&MaterialParams::silicon(), &PiecewiseProfile::silicon_bar(), &cfg, &times).unwrap();
    assert_eq!(snaps.iter().map(|s| s.t).collect::<Vec<_>>(), times);
    assert!(fd_solve(&MaterialParams::silicon(), &PiecewiseProfile::silicon_bar(), &cfg, &[1.0, 0.5]).is_err());
}

#[test]
fn single_mode_matches_closed_form_amplitude() {
    let m = unit_material(0.05);
    let n = 256;
    let s = run_smooth(&m, n, 1e-4, TimeScheme::Trapezoidal, 0.1);
    let proj: f64 = s.xs.iter().zip(&s.temps).map(|(x, v)| v * (2.0 * PI * x).cos()).sum::<f64>() * 2.0 / n as f64;
    let mode = derive_mode_params(&m, 2.0 * PI).unwrap();
    let want = mode_temperature(&ModeInitialData::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)), &mode, 0.1)
        .unwrap()
        .re;
    assert!((proj - want).abs() < 1e-3, "{proj} vs {want}");
}
