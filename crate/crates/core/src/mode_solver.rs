//! Single-mode solution through the potential `q`.
//!
//! The observable of one mode obeys `T̈ + 2λṪ + ω²T = 0`. It is represented as
//! the image of a potential under the adjoint operator,
//! `T = q̈ − 2λq̇ + ω²q`, and the Lagrangian `½(q̈ − 2λq̇ + ω²q)²` yields the
//! fourth-order Euler–Lagrange equation
//!
//! ```text
//! q'''' + (2ω² − 4λ²) q'' + ω⁴ q = 0
//! ```
//!
//! whose four branches are `e^{−(λ+γ)t}`, `e^{−(λ−γ)t}`, `e^{(λ+γ)t}` and
//! `e^{(λ−γ)t}`. The potential initial state built by
//! [`potential_initial_conditions`] puts zero weight on the two growing
//! branches; [`coefficients_from_linear_system`] checks that independently.
//!
//! Every amplitude is complex since the initial data comes from a spatial
//! transform.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{ModeParams, Regime};

// Terms kept in the cosh / sinh series of the near-critical branch.
const NEAR_CRITICAL_TERMS: usize = 6;

// Pairwise rate separation (relative to the largest rate) below which the
// 4×4 branch system is considered singular.
const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeInitialData {
    /// Observable at `t = 0`.
    pub t0: Complex64,
    /// Time derivative of the observable at `t = 0`.
    pub s0: Complex64,
}

impl ModeInitialData {
    pub fn new(t0: Complex64, s0: Complex64) -> Self {
        ModeInitialData { t0, s0 }
    }

    pub fn real(t0: f64, s0: f64) -> Self {
        ModeInitialData { t0: t0.into(), s0: s0.into() }
    }
}

/// Potential and its first three time derivatives at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialInitialState {
    pub q0: Complex64,
    pub q1: Complex64,
    pub q2: Complex64,
    pub q3: Complex64,
}

impl PotentialInitialState {
    fn as_array(&self) -> [Complex64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }
}

/// `q(t) = Σ coeffs[i]·e^{rates[i]·t}`, branches ordered
/// `−(λ+γ), −(λ−γ), +(λ+γ), +(λ−γ)` with coefficients `a1, a2, b1, b2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub rates: [Complex64; 4],
    pub coeffs: [Complex64; 4],
    pub mode: ModeParams,
}

impl ModeSolution {
    fn with_coeffs(mode: &ModeParams, coeffs: [Complex64; 4]) -> Self {
        ModeSolution { rates: branch_rates(mode), coeffs, mode: *mode }
    }

    pub fn a1(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn a2(&self) -> Complex64 {
        self.coeffs[1]
    }

    pub fn b1(&self) -> Complex64 {
        self.coeffs[2]
    }

    pub fn b2(&self) -> Complex64 {
        self.coeffs[3]
    }

    // Unchecked evaluation; also valid for t < 0 (used by FD stencils).
    fn eval(&self, t: f64, order: u32) -> Complex64 {
        self.rates
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(r, c)| c * r.powu(order) * (r * t).exp())
            .sum()
    }
}

fn branch_rates(mode: &ModeParams) -> [Complex64; 4] {
    let fast = mode.fast_rate();
    let slow = mode.slow_rate();
    [-fast, -slow, fast, slow]
}

fn require_potential_regime(mode: &ModeParams) -> Result<()> {
    if mode.regime == Regime::ZeroMode || mode.omega_sq == 0.0 {
        return Err(Error::ZeroMode);
    }
    Ok(())
}

/// Potential initial state that suppresses the growing branches.
///
/// `q0 = (2λT0 + S0)/(4λω²)`, `q1 = −T0/(4λ)`, `q2 = −S0/(4λ)`,
/// `q3 = (ω²T0 + 2λS0)/(4λ)`.
pub fn potential_initial_conditions(init: &ModeInitialData, mode: &ModeParams) -> Result<PotentialInitialState> {
    require_potential_regime(mode)?;
    let lam = mode.lambda;
    let w2 = mode.omega_sq;
    let four_lam = 4.0 * lam;
    Ok(PotentialInitialState {
        q0: (2.0 * lam * init.t0 + init.s0) / (four_lam * w2),
        q1: -init.t0 / four_lam,
        q2: -init.s0 / four_lam,
        q3: (w2 * init.t0 + 2.0 * lam * init.s0) / four_lam,
    })
}

/// `a1 = ((γ−λ)T0 − S0)/(8γλ(λ+γ))`, `a2 = ((γ+λ)T0 + S0)/(8γλ(λ−γ))`,
/// `b1 = b2 = 0`.
pub fn coefficients_closed_form(init: &ModeInitialData, mode: &ModeParams) -> Result<ModeSolution> {
    match mode.regime {
        Regime::Overdamped | Regime::Underdamped => {}
        other => {
            return Err(Error::Regime {
                found: other.as_str(), reason: "closed-form coefficients divide by γ and λ−γ"
            })
        }
    }
    let lam = mode.lambda;
    let g = mode.gamma;
    let fast = mode.fast_rate();
    let slow = mode.slow_rate();
    let denom = 8.0 * g * lam;
    let a1 = (-slow * init.t0 - init.s0) / (denom * fast);
    let a2 = (fast * init.t0 + init.s0) / (denom * slow);
    let zero = Complex64::new(0.0, 0.0);
    Ok(ModeSolution::with_coeffs(mode, [a1, a2, zero, zero]))
}

/// Matches `q, q̇, q̈, q⃛` at `t = 0` against all four branches without
/// assuming anything about the growing ones.
pub fn coefficients_from_linear_system(state: &PotentialInitialState, mode: &ModeParams) -> Result<ModeSolution> {
    let rates = branch_rates(mode);
    let scale = rates.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Degenerate(format!("rate scale {scale}")));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let sep = (rates[i] - rates[j]).norm() / scale;
            if sep < DEGENERACY_TOL {
                return Err(Error::Degenerate(format!("branches {i} and {j} coincide (relative separation {sep:e})")));
            }
        }
    }
    // Rows are derivative orders, rescaled by scale^m to keep entries O(1).
    let u: Vec<Complex64> = rates.iter().map(|r| r / scale).collect();
    let q = state.as_array();
    let mut rhs = Vector4::zeros();
    let mut mat = Matrix4::zeros();
    for m in 0..4 {
        rhs[m] = q[m] / scale.powi(m as i32);
        for (i, ui) in u.iter().enumerate() {
            mat[(m, i)] = ui.powu(m as u32);
        }
    }
    let sol = mat.lu().solve(&rhs).ok_or_else(|| Error::Degenerate("singular branch matrix".into()))?;
    Ok(ModeSolution::with_coeffs(mode, [sol[0], sol[1], sol[2], sol[3]]))
}

/// `d^order q / dt^order` at time `t`.
pub fn evaluate_potential(sol: &ModeSolution, t: f64, order: u32) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("t = {t} must be finite and >= 0")));
    }
    if order > 3 {
        return Err(Error::Parameter(format!("derivative order {order} not in 0..=3")));
    }
    Ok(sol.eval(t, order))
}

/// Adjoint operator: `q̈ − 2λq̇ + ω²q`.
pub fn potential_to_observable(q0: Complex64, q1: Complex64, q2: Complex64, mode: &ModeParams) -> Complex64 {
    q2 - 2.0 * mode.lambda * q1 + mode.omega_sq * q0
}

/// Observable temperature amplitude of one mode at time `t`.
///
/// Overdamped and underdamped modes use the composition of the fitted
/// potential with the adjoint operator,
/// `[((γ−λ)T0 − S0)e^{−(λ+γ)t} + ((γ+λ)T0 + S0)e^{−(λ−γ)t}]/(2γ)`.
/// Near-critical modes use the equivalent
/// `e^{−λt}[T0 cosh γt + (λT0 + S0) sinh(γt)/γ]` expanded in `γ²t²`, and the
/// `k = 0` mode uses `T0 + S0(1 − e^{−2λt})/(2λ)`.
pub fn mode_temperature(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Result<Complex64> {
    check_time(t)?;
    Ok(match mode.regime {
        Regime::ZeroMode => zero_mode_value(init, mode, t),
        Regime::NearCritical => near_critical_value(init, mode, t),
        Regime::Overdamped | Regime::Underdamped => generic_value(init, mode, t),
    })
}

/// Analytic time derivative of [`mode_temperature`].
pub fn mode_temperature_rate(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Result<Complex64> {
    check_time(t)?;
    Ok(match mode.regime {
        Regime::ZeroMode => init.s0 * (-2.0 * mode.lambda * t).exp(),
        Regime::NearCritical => near_critical_rate(init, mode, t),
        Regime::Overdamped | Regime::Underdamped => generic_rate(init, mode, t),
    })
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("t = {t} must be finite and >= 0")))
    }
}

/// Two-exponential form, valid away from the critical band and `k = 0`.
pub fn generic_value(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Complex64 {
    let fast = mode.fast_rate();
    let slow = mode.slow_rate();
    let fast_amp = -slow * init.t0 - init.s0;
    let slow_amp = fast * init.t0 + init.s0;
    (fast_amp * (-fast * t).exp() + slow_amp * (-slow * t).exp()) / (2.0 * mode.gamma)
}

fn generic_rate(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Complex64 {
    let fast = mode.fast_rate();
    let slow = mode.slow_rate();
    let w2 = mode.omega_sq;
    let fast_amp = w2 * init.t0 + fast * init.s0;
    let slow_amp = w2 * init.t0 + slow * init.s0;
    (fast_amp * (-fast * t).exp() - slow_amp * (-slow * t).exp()) / (2.0 * mode.gamma)
}

// cosh(√z) and sinh(√z)/√z truncated after NEAR_CRITICAL_TERMS terms.
fn cosh_sinhc_series(z: Complex64) -> (Complex64, Complex64) {
    let mut c = Complex64::new(0.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    let mut fact_even = 1.0; // (2n)!
    for n in 0..NEAR_CRITICAL_TERMS {
        if n > 0 {
            fact_even *= ((2 * n - 1) * (2 * n)) as f64;
        }
        let fact_odd = fact_even * (2 * n + 1) as f64;
        c += zn / fact_even;
        s += zn / fact_odd;
        zn *= z;
    }
    (c, s)
}

/// Series form around `γ = 0`, valid in the near-critical band.
pub fn near_critical_value(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Complex64 {
    let lam = mode.lambda;
    let z = mode.gamma * mode.gamma * t * t;
    let (c, s) = cosh_sinhc_series(z);
    (-lam * t).exp() * (init.t0 * c + (lam * init.t0 + init.s0) * t * s)
}

fn near_critical_rate(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Complex64 {
    let lam = mode.lambda;
    let g2 = mode.gamma * mode.gamma;
    let (c, s) = cosh_sinhc_series(g2 * t * t);
    let value = (-lam * t).exp() * (init.t0 * c + (lam * init.t0 + init.s0) * t * s);
    -lam * value + (-lam * t).exp() * (init.t0 * g2 * t * s + (lam * init.t0 + init.s0) * c)
}

fn zero_mode_value(init: &ModeInitialData, mode: &ModeParams, t: f64) -> Complex64 {
    let two_lam = 2.0 * mode.lambda;
    init.t0 + init.s0 * (-(-two_lam * t).exp_m1() / two_lam)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lagrangian {
    /// `½ A²` with `A = q̈ − 2λq̇ + ω²q`, taken literally for complex `A`.
    pub square: Complex64,
    /// `½ |A|²`, the reported density.
    pub modulus: f64,
}

pub fn lagrangian_density(q0: Complex64, q1: Complex64, q2: Complex64, mode: &ModeParams) -> Lagrangian {
    let a = potential_to_observable(q0, q1, q2, mode);
    Lagrangian { square: 0.5 * a * a, modulus: 0.5 * a.norm_sqr() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Second,
    Fourth,
}

/// Largest residual of `q'''' + (2ω² − 4λ²)q'' + ω⁴q` over `t_grid`, with the
/// derivatives taken by central differences of step `h` and the result
/// normalized by `max |ω⁴ q|`.
pub fn el_residual(sol: &ModeSolution, t_grid: &[f64], h: f64, stencil: Stencil) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Step(format!("h = {h} must be finite and > 0")));
    }
    let max_rate = sol.rates.iter().map(|r| r.norm()).fold(0.0, f64::max);
    if max_rate * h >= 1.0 {
        return Err(Error::Step(format!("rate·h = {} >= 1", max_rate * h)));
    }
    let w2 = sol.mode.omega_sq;
    let lam = sol.mode.lambda;
    let c2 = 2.0 * w2 - 4.0 * lam * lam;
    let w4 = w2 * w2;
    let mut worst = 0.0_f64;
    let mut norm = 0.0_f64;
    for &t in t_grid {
        let q = |j: i32| sol.eval(t + j as f64 * h, 0);
        let (d2, d4) = match stencil {
            Stencil::Second => {
                let d2 = (q(1) - 2.0 * q(0) + q(-1)) / (h * h);
                let d4 = (q(2) - 4.0 * q(1) + 6.0 * q(0) - 4.0 * q(-1) + q(-2)) / h.powi(4);
                (d2, d4)
            }
            Stencil::Fourth => {
                let d2 = (-q(2) + 16.0 * q(1) - 30.0 * q(0) + 16.0 * q(-1) - q(-2)) / (12.0 * h * h);
                let d4 = (-q(3) + 12.0 * q(2) - 39.0 * q(1) + 56.0 * q(0) - 39.0 * q(-1) + 12.0 * q(-2) - q(-3))
                    / (6.0 * h.powi(4));
                (d2, d4)
            }
        };
        let q0 = q(0);
        worst = worst.max((d4 + c2 * d2 + w4 * q0).norm());
        norm = norm.max((w4 * q0).norm());
    }
    if worst == 0.0 {
        return Ok(0.0);
    }
    Ok(if norm > 0.0 { worst / norm } else { worst })
}
