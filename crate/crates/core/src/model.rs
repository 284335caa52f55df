//! Material constants and per-wavenumber oscillator parameters.
//!
//! Transforming the spatial variable of `τ T̈ + ϱ c_v Ṫ − λ′ T_xx = 0` turns
//! every wavenumber `k` into a damped oscillator with
//! `2λ = ϱ c_v / τ` and `ω² = (λ′/τ) k²`.
//!
//! Units: `τ` is taken in seconds so that `ϱ c_v / τ` is a rate. Positions and
//! wavenumbers live on the normalized domain `[0, L]`; the conductivity enters
//! the reduced equation exactly as written above, without further rescaling.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Relative half-width of the band around `ω² = λ²` treated as critical.
pub const DEFAULT_CRITICAL_EPS: f64 = 1e-8;

fn default_length() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    /// Mass density ϱ [kg/m³].
    pub rho: f64,
    /// Specific heat [J/(kg·K)].
    pub c_v: f64,
    /// Heat conductivity λ′ [W/(m·K)].
    pub conductivity: f64,
    /// Relaxation time τ [s].
    pub tau: f64,
    /// Spatial period L in model units.
    #[serde(default = "default_length")]
    pub domain_length: f64,
}

impl MaterialParams {
    pub fn new(rho: f64, c_v: f64, conductivity: f64, tau: f64, domain_length: f64) -> Result<Self> {
        let m = MaterialParams { rho, c_v, conductivity, tau, domain_length };
        m.validate()?;
        Ok(m)
    }

    /// Silicon: ϱ = 2300, c_v = 700, λ′ = 149, τ = 1e-4, on a unit domain.
    pub fn silicon() -> Self {
        MaterialParams { rho: 2300.0, c_v: 700.0, conductivity: 149.0, tau: 1e-4, domain_length: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rho", self.rho),
            ("c_v", self.c_v),
            ("conductivity", self.conductivity),
            ("tau", self.tau),
            ("domain_length", self.domain_length),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// λ = ϱ c_v / (2τ).
    pub fn damping(&self) -> f64 {
        self.rho * self.c_v / (2.0 * self.tau)
    }

    /// λ′/τ, the squared speed of the undamped thermal wave.
    pub fn wave_speed_sq(&self) -> f64 {
        self.conductivity / self.tau
    }

    pub fn wave_speed(&self) -> f64 {
        self.wave_speed_sq().sqrt()
    }

    /// Thermal diffusivity α = λ′/(ϱ c_v).
    pub fn diffusivity(&self) -> f64 {
        self.conductivity / (self.rho * self.c_v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Overdamped,
    NearCritical,
    Underdamped,
    ZeroMode,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Overdamped => "overdamped",
            Regime::NearCritical => "near_critical",
            Regime::Underdamped => "underdamped",
            Regime::ZeroMode => "zero_mode",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Oscillator parameters of one spectral mode.
///
/// `gamma` is always complex: real in the overdamped regime, imaginary in the
/// underdamped one, so a single set of formulas serves both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    pub k: f64,
    pub lambda: f64,
    pub omega_sq: f64,
    pub gamma: Complex64,
    pub regime: Regime,
}

impl ModeParams {
    /// Builds a mode directly from `λ` and `ω²`, bypassing the material.
    /// `k` is set to `ω`, i.e. a unit wave speed.
    pub fn from_rates(lambda: f64, omega_sq: f64, eps_c: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::Parameter(format!("lambda must be finite and > 0, got {lambda}")));
        }
        if !(omega_sq.is_finite() && omega_sq >= 0.0) {
            return Err(Error::Parameter(format!("omega_sq must be finite and >= 0, got {omega_sq}")));
        }
        if !(eps_c > 0.0 && eps_c < 1.0) {
            return Err(Error::Parameter(format!("eps_c must lie in (0, 1), got {eps_c}")));
        }
        let omega = omega_sq.sqrt();
        // (λ−ω)(λ+ω) keeps γ² accurate when ω ≈ λ.
        let gamma_sq = (lambda - omega) * (lambda + omega);
        let gamma = if gamma_sq >= 0.0 {
            Complex64::new(gamma_sq.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-gamma_sq).sqrt())
        };
        Ok(ModeParams { k: omega, lambda, omega_sq, gamma, regime: classify_regime(lambda, omega_sq, eps_c) })
    }

    /// λ + γ, rate of the fast decaying branch.
    pub fn fast_rate(&self) -> Complex64 {
        self.lambda + self.gamma
    }

    /// λ − γ, rate of the slow decaying branch, computed as ω²/(λ+γ).
    pub fn slow_rate(&self) -> Complex64 {
        self.omega_sq / self.fast_rate()
    }
}

pub fn classify_regime(lambda: f64, omega_sq: f64, eps_c: f64) -> Regime {
    let lambda_sq = lambda * lambda;
    if omega_sq == 0.0 {
        Regime::ZeroMode
    } else if omega_sq < lambda_sq * (1.0 - eps_c) {
        Regime::Overdamped
    } else if omega_sq > lambda_sq * (1.0 + eps_c) {
        Regime::Underdamped
    } else {
        Regime::NearCritical
    }
}

pub fn derive_mode_params(material: &MaterialParams, k: f64) -> Result<ModeParams> {
    derive_mode_params_with(material, k, DEFAULT_CRITICAL_EPS)
}

pub fn derive_mode_params_with(material: &MaterialParams, k: f64, eps_c: f64) -> Result<ModeParams> {
    material.validate()?;
    if !k.is_finite() || k < 0.0 {
        return Err(Error::Parameter(format!("wavenumber must be finite and >= 0, got {k}")));
    }
    let omega_sq = material.wave_speed_sq() * k * k;
    let mut mode = ModeParams::from_rates(material.damping(), omega_sq, eps_c)?;
    mode.k = k;
    Ok(mode)
}

/// Fourier-limit decay rate α k² of mode `k`.
pub fn diffusive_rate(material: &MaterialParams, k: f64) -> f64 {
    material.diffusivity() * k * k
}
