//! Finite-difference reference solver for `τ T̈ + ϱ c_v Ṫ − λ′ T_xx = 0`.
//!
//! Second-order central differences in space on a periodic cell-centred grid,
//! `x_i = iL/n`, and one of two time integrators for the first-order system
//! `(T, V = Ṫ)`:
//!
//! * `Trapezoidal`: implicit trapezoidal rule, unconditionally stable. The
//!   first step is split into two backward-Euler half steps so the stiff
//!   `−2λ` branch (about `−1.6e10 s⁻¹` for silicon) is damped instead of
//!   ringing at amplification `−1`.
//! * `Leapfrog`: explicit three-level scheme with centred damping, for the
//!   wave regime where `τ` is large.
//!
//! The oracle shares nothing with the spectral path except the material and
//! profile types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MaterialParams;
use crate::profile::PiecewiseProfile;
use crate::spectral_field::FieldSnapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    Leapfrog,
    Trapezoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub n_cells: usize,
    pub dt: f64,
    pub scheme: TimeScheme,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { n_cells: 4096, dt: 1e-3, scheme: TimeScheme::Trapezoidal }
    }
}

impl OracleConfig {
    /// `min(Δx/c, 1/λ)` with `c = √(λ′/τ)`; the explicit scheme needs
    /// `dt ≤ 0.9` of this.
    pub fn explicit_step_limit(&self, material: &MaterialParams) -> f64 {
        let dx = material.domain_length / self.n_cells as f64;
        (dx / material.wave_speed()).min(1.0 / material.damping())
    }

    pub fn validate(&self, material: &MaterialParams) -> Result<()> {
        if self.n_cells < 3 {
            return Err(Error::Parameter(format!("n_cells must be >= 3, got {}", self.n_cells)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Parameter(format!("dt must be finite and > 0, got {}", self.dt)));
        }
        if self.scheme == TimeScheme::Leapfrog {
            let limit = 0.9 * self.explicit_step_limit(material);
            if self.dt > limit {
                return Err(Error::Stability(format!("explicit dt = {:e} exceeds 0.9·dt_CFL = {limit:e}", self.dt)));
            }
        }
        Ok(())
    }
}

/// Cell averages of the profile around each node, wrapping periodically.
pub fn cell_averages(profile: &PiecewiseProfile, n_cells: usize) -> Result<Vec<f64>> {
    let length = profile.length();
    let dx = length / n_cells as f64;
    (0..n_cells)
        .map(|i| {
            let lo = (i as f64 - 0.5) * dx;
            let hi = (i as f64 + 0.5) * dx;
            let total = if lo < 0.0 {
                profile.integrate(0.0, hi)? + profile.integrate(length + lo, length)?
            } else if hi > length {
                profile.integrate(lo, length)? + profile.integrate(0.0, hi - length)?
            } else {
                profile.integrate(lo, hi)?
            };
            Ok(total / dx)
        })
        .collect()
}

/// Runs the oracle from a piecewise profile with `Ṫ(x, 0) = 0`.
pub fn fd_solve(
    material: &MaterialParams,
    profile: &PiecewiseProfile,
    config: &OracleConfig,
    times: &[f64],
) -> Result<Vec<FieldSnapshot>> {
    config.validate(material)?;
    let temps = cell_averages(profile, config.n_cells)?;
    let rates = vec![0.0; config.n_cells];
    fd_solve_samples(material, &temps, &rates, config, times)
}

/// Runs the oracle from nodal temperatures and rates on `x_i = iL/n`.
pub fn fd_solve_samples(
    material: &MaterialParams,
    temps: &[f64],
    rates: &[f64],
    config: &OracleConfig,
    times: &[f64],
) -> Result<Vec<FieldSnapshot>> {
    material.validate()?;
    config.validate(material)?;
    let n = config.n_cells;
    if temps.len() != n || rates.len() != n {
        return Err(Error::Parameter(format!(
            "initial data has {} / {} entries, expected {n}",
            temps.len(),
            rates.len()
        )));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("times must be finite, >= 0 and sorted".into()));
    }
    let length = material.domain_length;
    let dx = length / n as f64;
    let xs: Vec<f64> = (0..n).map(|i| i as f64 * dx).collect();
    let mut stepper: Box<dyn Stepper> = match config.scheme {
        TimeScheme::Trapezoidal => Box::new(Trapezoidal::new(material, dx, config.dt, temps, rates)),
        TimeScheme::Leapfrog => Box::new(Leapfrog::new(material, dx, config.dt, temps, rates)),
    };

    let dt = config.dt;
    let mut out = Vec::with_capacity(times.len());
    let mut step = 0_u64;
    let mut prev = temps.to_vec();
    for &t in times {
        let target = t / dt;
        // Advance until step·dt >= t (allowing for roundoff in t/dt).
        while (step as f64) < target - 1e-9 {
            prev.copy_from_slice(stepper.current());
            stepper.advance();
            step += 1;
        }
        let cur = stepper.current();
        let behind = step as f64 - target;
        let temps = if behind.abs() <= 1e-9 || step == 0 {
            cur.to_vec()
        } else {
            // Linear interpolation between steps step−1 and step.
            let w = 1.0 - behind;
            prev.iter().zip(cur).map(|(a, b)| (1.0 - w) * a + w * b).collect()
        };
        out.push(FieldSnapshot { t, xs: xs.clone(), temps, imag_residual: 0.0 });
    }
    Ok(out)
}

trait Stepper {
    fn advance(&mut self);
    fn current(&self) -> &[f64];
}

// Periodic second difference without the 1/Δx² factor.
fn second_difference(u: &[f64], out: &mut [f64]) {
    let n = u.len();
    for i in 0..n {
        let l = u[(i + n - 1) % n];
        let r = u[(i + 1) % n];
        out[i] = l - 2.0 * u[i] + r;
    }
}

/// Solver for `(I − β D) x = rhs` with `D` the periodic second difference,
/// via Thomas elimination plus a Sherman–Morrison correction for the corners.
struct CyclicSolver {
    off: f64,
    // Forward-sweep factors of the non-cyclic matrix.
    c_prime: Vec<f64>,
    denom: Vec<f64>,
    z: Vec<f64>,
    v_last: f64,
}

impl CyclicSolver {
    #[allow(clippy::needless_range_loop)]
    fn new(beta: f64, n: usize) -> Self {
        let diag = 1.0 + 2.0 * beta;
        let off = -beta;
        let gamma = -diag;
        let mut s =
            CyclicSolver { off, c_prime: vec![0.0; n], denom: vec![0.0; n], z: vec![0.0; n], v_last: off / gamma };
        // B = A − u vᵀ with u = (γ, 0, …, 0, off), v = (1, 0, …, 0, off/γ).
        let mut b = vec![diag; n];
        b[0] -= gamma;
        b[n - 1] -= off * off / gamma;
        s.denom[0] = b[0];
        s.c_prime[0] = off / b[0];
        for i in 1..n {
            s.denom[i] = b[i] - off * s.c_prime[i - 1];
            s.c_prime[i] = off / s.denom[i];
        }
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = off;
        s.thomas(&mut u);
        s.z = u;
        s
    }

    fn thomas(&self, d: &mut [f64]) {
        let n = d.len();
        d[0] /= self.denom[0];
        for i in 1..n {
            d[i] = (d[i] - self.off * d[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            d[i] -= self.c_prime[i] * d[i + 1];
        }
    }

    fn solve(&self, d: &mut [f64]) {
        let n = d.len();
        self.thomas(d);
        let vy = d[0] + self.v_last * d[n - 1];
        let vz = self.z[0] + self.v_last * self.z[n - 1];
        let f = vy / (1.0 + vz);
        for (di, zi) in d.iter_mut().zip(&self.z) {
            *di -= f * zi;
        }
    }
}

struct Trapezoidal {
    temps: Vec<f64>,
    rates: Vec<f64>,
    half: f64,
    two_lambda: f64,
    c2_over_dx2: f64,
    // Backward Euler over dt/2 and the trapezoidal rule over dt share
    // β = (dt/2)² c² / (Δx² (1 + λ dt)).
    solver: CyclicSolver,
    beta: f64,
    started: bool,
    work: Vec<f64>,
    lap: Vec<f64>,
}

impl Trapezoidal {
    fn new(material: &MaterialParams, dx: f64, dt: f64, temps: &[f64], rates: &[f64]) -> Self {
        let n = temps.len();
        let two_lambda = 2.0 * material.damping();
        let c2_over_dx2 = material.wave_speed_sq() / (dx * dx);
        let s = 0.5 * dt;
        let beta = s * s * c2_over_dx2 / (1.0 + two_lambda * s);
        Trapezoidal {
            temps: temps.to_vec(),
            rates: rates.to_vec(),
            half: s,
            two_lambda,
            c2_over_dx2,
            solver: CyclicSolver::new(beta, n),
            beta,
            started: false,
            work: vec![0.0; n],
            lap: vec![0.0; n],
        }
    }

    fn euler_half_step(&mut self) {
        let h = self.half;
        let damp = 1.0 + self.two_lambda * h;
        for i in 0..self.temps.len() {
            self.work[i] = self.temps[i] + h * self.rates[i] / damp;
        }
        self.solver.solve(&mut self.work);
        second_difference(&self.work, &mut self.lap);
        for i in 0..self.temps.len() {
            self.rates[i] = (self.rates[i] + h * self.c2_over_dx2 * self.lap[i]) / damp;
        }
        std::mem::swap(&mut self.temps, &mut self.work);
    }

    fn trapezoidal_step(&mut self) {
        let s = self.half;
        let damp = 1.0 + self.two_lambda * s;
        let keep = (1.0 - self.two_lambda * s) / damp;
        second_difference(&self.temps, &mut self.lap);
        for i in 0..self.temps.len() {
            self.work[i] = self.temps[i] + self.beta * self.lap[i] + 2.0 * s * self.rates[i] / damp;
        }
        self.solver.solve(&mut self.work);
        // lap ← D(T_new + T_old)
        let n = self.temps.len();
        for i in 0..n {
            let l = self.work[(i + n - 1) % n];
            let r = self.work[(i + 1) % n];
            self.lap[i] += l - 2.0 * self.work[i] + r;
        }
        for i in 0..n {
            self.rates[i] = keep * self.rates[i] + s * self.c2_over_dx2 * self.lap[i] / damp;
        }
        std::mem::swap(&mut self.temps, &mut self.work);
    }
}

impl Stepper for Trapezoidal {
    fn advance(&mut self) {
        if self.started {
            self.trapezoidal_step();
        } else {
            self.euler_half_step();
            self.euler_half_step();
            self.started = true;
        }
    }

    fn current(&self) -> &[f64] {
        &self.temps
    }
}

struct Leapfrog {
    prev: Vec<f64>,
    cur: Vec<f64>,
    next: Vec<f64>,
    lap: Vec<f64>,
    lambda_dt: f64,
    courant_sq: f64,
    initial_rates: Option<Vec<f64>>,
    dt: f64,
}

impl Leapfrog {
    fn new(material: &MaterialParams, dx: f64, dt: f64, temps: &[f64], rates: &[f64]) -> Self {
        let n = temps.len();
        Leapfrog {
            prev: vec![0.0; n],
            cur: temps.to_vec(),
            next: vec![0.0; n],
            lap: vec![0.0; n],
            lambda_dt: material.damping() * dt,
            courant_sq: material.wave_speed_sq() * dt * dt / (dx * dx),
            initial_rates: Some(rates.to_vec()),
            dt,
        }
    }
}

impl Stepper for Leapfrog {
    #[allow(clippy::needless_range_loop)]
    fn advance(&mut self) {
        second_difference(&self.cur, &mut self.lap);
        if let Some(v) = self.initial_rates.take() {
            // Taylor start: T¹ = T⁰ + dt V + dt²/2 (c² D T⁰ − 2λ V)
            let dt = self.dt;
            for i in 0..self.cur.len() {
                self.next[i] =
                    self.cur[i] + dt * v[i] + 0.5 * (self.courant_sq * self.lap[i] - 2.0 * self.lambda_dt * dt * v[i]);
            }
        } else {
            let a = 1.0 + self.lambda_dt;
            let b = 1.0 - self.lambda_dt;
            for i in 0..self.cur.len() {
                self.next[i] = (2.0 * self.cur[i] - b * self.prev[i] + self.courant_sq * self.lap[i]) / a;
            }
        }
        std::mem::swap(&mut self.prev, &mut self.cur);
        std::mem::swap(&mut self.cur, &mut self.next);
    }

    fn current(&self) -> &[f64] {
        &self.cur
    }
}

/// Speed of the right-moving front: the outermost position (scanning from
/// `x = L` inward) where the temperature reaches `threshold`, fitted by least
/// squares against time. On the periodic grid a left-moving front eventually
/// re-enters at `x = L`, so snapshots must end before any front crosses the
/// seam.
pub fn wavefront_speed(snapshots: &[FieldSnapshot], threshold: f64) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::FrontDetection(format!("need at least two snapshots, got {}", snapshots.len())));
    }
    let mut points = Vec::with_capacity(snapshots.len());
    for s in snapshots {
        let pos = front_position(s, threshold)
            .ok_or_else(|| Error::FrontDetection(format!("no front above {threshold} at t = {}", s.t)))?;
        points.push((s.t, pos));
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_x = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FrontDetection("snapshots share a single time".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_x)).sum();
    Ok(sxy / sxx)
}

fn front_position(s: &FieldSnapshot, threshold: f64) -> Option<f64> {
    let i = s.temps.iter().rposition(|&v| v >= threshold)?;
    if i + 1 >= s.temps.len() {
        return Some(s.xs[i]);
    }
    let (v0, v1) = (s.temps[i], s.temps[i + 1]);
    let w = if v0 != v1 { (v0 - threshold) / (v0 - v1) } else { 0.0 };
    Some(s.xs[i] + w * (s.xs[i + 1] - s.xs[i]))
}
