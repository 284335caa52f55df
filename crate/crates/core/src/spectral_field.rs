//! Space-time temperature field assembled from independent spectral modes.
//!
//! With `k_n = 2πn/L` for `n = −N..=N`, the field is the Fourier series
//!
//! ```text
//! T(x, t) = (1/L) Σ_n T̃(k_n, t) e^{i k_n x}
//! ```
//!
//! where `T̃(k_n, 0)` is the exact transform of the initial profile. On the
//! periodic box `[0, L)` this is the partial Fourier sum of the profile's
//! periodic extension, so the jump between `x = L` and `x = 0` is part of the
//! model.
//!
//! Grid points sit at `x_j = jL/M`, so `e^{i k_n x_j}` only depends on
//! `n mod M`. Coefficients are folded into `M` buckets first, which keeps the
//! cost at `O(N + M²)` per time regardless of `N`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mode_solver::{mode_temperature, ModeInitialData};
use crate::model::{derive_mode_params_with, MaterialParams, ModeParams, DEFAULT_CRITICAL_EPS};
use crate::profile::PiecewiseProfile;

/// Relative imaginary residual above which a snapshot is rejected.
pub const SYMMETRY_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub length: f64,
    pub n_modes: usize,
    pub n_points: usize,
}

impl SpectralGrid {
    /// Mode indices in the summation order `0, 1, −1, 2, −2, …`.
    pub fn mode_indices(&self) -> impl Iterator<Item = i64> {
        let n = self.n_modes as i64;
        std::iter::once(0).chain((1..=n).flat_map(|m| [m, -m]))
    }

    pub fn wavenumber(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.length
    }

    /// `k_n` for `n = −N..=N`, ascending.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_modes as i64;
        (-n..=n).map(|i| self.wavenumber(i)).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        let m = self.n_points as f64;
        (0..self.n_points).map(|j| j as f64 * self.length / m).collect()
    }
}

pub fn build_grid(length: f64, n_modes: usize, n_points: usize) -> Result<SpectralGrid> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::Parameter(format!("domain length must be finite and > 0, got {length}")));
    }
    if n_modes < 1 {
        return Err(Error::Parameter("n_modes must be >= 1".into()));
    }
    if n_points < 2 {
        return Err(Error::Parameter(format!("n_points must be >= 2, got {n_points}")));
    }
    Ok(SpectralGrid { length, n_modes, n_points })
}

/// Initial time derivative of each mode.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialRate {
    Zero,
    /// `S0(k_n)` for `n = −N..=N`, ascending.
    Explicit(Vec<Complex64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot {
    pub t: f64,
    pub xs: Vec<f64>,
    pub temps: Vec<f64>,
    /// Largest discarded imaginary part, relative to `max |temps|`.
    pub imag_residual: f64,
}

impl FieldSnapshot {
    pub fn min(&self) -> f64 {
        self.temps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.temps.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Periodic linear interpolation onto `xs` (exact where nodes coincide).
    pub fn resample(&self, xs: &[f64], length: f64) -> Result<FieldSnapshot> {
        let n = self.xs.len();
        if n < 2 {
            return Err(Error::GridMismatch("cannot resample fewer than two points".into()));
        }
        let dx = length / n as f64;
        let temps = xs
            .iter()
            .map(|&x| {
                let s = x / dx;
                let nearest = s.round();
                if (s - nearest).abs() < 1e-9 {
                    return self.temps[(nearest as usize) % n];
                }
                let i = s.floor() as usize;
                let w = s - s.floor();
                (1.0 - w) * self.temps[i % n] + w * self.temps[(i + 1) % n]
            })
            .collect();
        Ok(FieldSnapshot { t: self.t, xs: xs.to_vec(), temps, imag_residual: self.imag_residual })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions {
    pub eps_c: f64,
    /// Multiply mode `n` by the Lanczos factor `sinc(n/(N+1))`.
    pub lanczos_sigma: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions { eps_c: DEFAULT_CRITICAL_EPS, lanczos_sigma: false }
    }
}

pub fn solve_field(
    material: &MaterialParams,
    profile: &PiecewiseProfile,
    grid: &SpectralGrid,
    times: &[f64],
    s0: &InitialRate,
) -> Result<Vec<FieldSnapshot>> {
    solve_field_with(material, profile, grid, times, s0, &FieldOptions::default())
}

struct Mode {
    n: i64,
    params: ModeParams,
    init: ModeInitialData,
    weight: f64,
}

pub fn solve_field_with(
    material: &MaterialParams,
    profile: &PiecewiseProfile,
    grid: &SpectralGrid,
    times: &[f64],
    s0: &InitialRate,
    options: &FieldOptions,
) -> Result<Vec<FieldSnapshot>> {
    material.validate()?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Parameter("times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("times must be sorted".into()));
    }
    let n_modes = grid.n_modes as i64;
    if let InitialRate::Explicit(rates) = s0 {
        if rates.len() != 2 * grid.n_modes + 1 {
            return Err(Error::Parameter(format!(
                "explicit S0 needs {} entries, got {}",
                2 * grid.n_modes + 1,
                rates.len()
            )));
        }
    }

    let modes: Vec<Mode> = grid
        .mode_indices()
        .map(|n| {
            let k = grid.wavenumber(n);
            let params = derive_mode_params_with(material, k.abs(), options.eps_c)?;
            let amp = profile.transform_grid(&[k])?[0].value;
            let rate = match s0 {
                InitialRate::Zero => Complex64::new(0.0, 0.0),
                InitialRate::Explicit(r) => r[(n + n_modes) as usize],
            };
            let weight = if options.lanczos_sigma && n != 0 {
                let z = PI * n as f64 / (grid.n_modes as f64 + 1.0);
                z.sin() / z
            } else {
                1.0
            };
            Ok(Mode { n, params, init: ModeInitialData::new(amp, rate), weight })
        })
        .collect::<Result<_>>()?;

    let m = grid.n_points;
    let twiddle: Vec<Complex64> = (0..m).map(|p| Complex64::from_polar(1.0, 2.0 * PI * p as f64 / m as f64)).collect();
    // Buckets are visited in the same 0, 1, −1, 2, −2, … order as the modes.
    let bucket_order: Vec<usize> = std::iter::once(0).chain((1..=m / 2).flat_map(|p| [p, m - p])).take(m).collect();
    let xs = grid.positions();
    let inv_len = 1.0 / grid.length;

    times
        .iter()
        .map(|&t| {
            let mut buckets = vec![Complex64::new(0.0, 0.0); m];
            for mode in &modes {
                let amp = mode_temperature(&mode.init, &mode.params, t)?;
                let slot = mode.n.rem_euclid(m as i64) as usize;
                buckets[slot] += amp * (mode.weight * inv_len);
            }
            let values: Vec<Complex64> = (0..m)
                .into_par_iter()
                .map(|j| bucket_order.iter().map(|&p| buckets[p] * twiddle[(p * j) % m]).sum())
                .collect();
            let scale = values.iter().map(|v| v.re.abs()).fold(0.0, f64::max);
            let imag = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            let limit = SYMMETRY_LIMIT * scale.max(f64::MIN_POSITIVE);
            if imag > limit {
                return Err(Error::SymmetryViolation { t, residual: imag, limit });
            }
            Ok(FieldSnapshot {
                t,
                xs: xs.clone(),
                temps: values.iter().map(|v| v.re).collect(),
                imag_residual: if scale > 0.0 { imag / scale } else { imag },
            })
        })
        .collect()
}

pub fn spatial_mean(snapshot: &FieldSnapshot) -> f64 {
    snapshot.temps.iter().sum::<f64>() / snapshot.temps.len() as f64
}

/// `‖a − b‖₂ / ‖b‖₂` over a shared grid.
pub fn l2_difference(a: &FieldSnapshot, b: &FieldSnapshot) -> Result<f64> {
    if a.xs.len() != b.xs.len() {
        return Err(Error::GridMismatch(format!("{} vs {} points", a.xs.len(), b.xs.len())));
    }
    let spacing = if a.xs.len() > 1 { (a.xs[1] - a.xs[0]).abs() } else { 1.0 };
    if a.xs.iter().zip(&b.xs).any(|(x, y)| (x - y).abs() > 1e-9 * spacing.max(1e-300)) {
        return Err(Error::GridMismatch("positions differ".into()));
    }
    let diff: f64 = a.temps.iter().zip(&b.temps).map(|(x, y)| (x - y) * (x - y)).sum();
    let norm: f64 = b.temps.iter().map(|y| y * y).sum();
    if norm == 0.0 {
        return Ok(if diff == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok((diff / norm).sqrt())
}
