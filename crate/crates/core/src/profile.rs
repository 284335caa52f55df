//! Piecewise-constant initial temperature profiles and their exact transform.
//!
//! The forward transform uses the kernel `e^{−ikx}` over `[0, L]`:
//!
//! ```text
//! T₀(k) = Σ_j −i C_j (e^{−ik a_j} − e^{−ik b_j}) / k
//! ```
//!
//! for segments `[a_j, b_j)` carrying the constant `C_j`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `|k|·L` the transform switches to a Taylor series.
pub const SMALL_K_SWITCH: f64 = 1e-4;

// Relative slack for contiguity checks between adjacent segments.
const CONTIGUITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    #[serde(rename = "from")]
    pub start: f64,
    #[serde(rename = "to")]
    pub end: f64,
    pub value: f64,
}

impl Segment {
    pub fn new(start: f64, end: f64, value: f64) -> Self {
        Segment { start, end, value }
    }

    // ∫_a^b e^{−ikx} dx
    fn kernel_integral(&self, k: f64, series: bool) -> Complex64 {
        if series {
            series_kernel(self.start, self.end, k)
        } else {
            direct_kernel(self.start, self.end, k)
        }
    }
}

fn direct_kernel(a: f64, b: f64, k: f64) -> Complex64 {
    let ea = Complex64::new(0.0, -k * a).exp();
    let eb = Complex64::new(0.0, -k * b).exp();
    -Complex64::i() * (ea - eb) / k
}

// (e^{−ika} − e^{−ikb})/(ik) = Σ_{m≥1} (−ik)^{m−1} (b^m − a^m)/m!
fn series_kernel(a: f64, b: f64, k: f64) -> Complex64 {
    let mik = Complex64::new(0.0, -k);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let (mut am, mut bm) = (1.0, 1.0);
    let mut fact = 1.0;
    for m in 1..=4 {
        am *= a;
        bm *= b;
        fact *= m as f64;
        sum += pow * ((bm - am) / fact);
        pow *= mik;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralAmplitude {
    pub k: f64,
    pub value: Complex64,
}

/// Initial temperature as contiguous constant blocks covering `[0, L]`.
///
/// Breakpoints follow the half-open convention `[start, end)`; the last
/// segment also owns `x = L`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseProfile {
    segments: Vec<Segment>,
}

impl PiecewiseProfile {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first =
            segments.first().ok_or_else(|| Error::Parameter("profile must have at least one segment".into()))?;
        if first.start != 0.0 {
            return Err(Error::Parameter(format!("profile must start at 0, starts at {}", first.start)));
        }
        let length = segments.last().map(|s| s.end).unwrap_or(0.0);
        let tol = CONTIGUITY_TOL * length.abs().max(1.0);
        for (i, s) in segments.iter().enumerate() {
            if !(s.start.is_finite() && s.end.is_finite() && s.value.is_finite()) {
                return Err(Error::Parameter(format!("segment {i} has non-finite fields")));
            }
            if s.start >= s.end {
                return Err(Error::Parameter(format!("segment {i} is empty or reversed: [{}, {})", s.start, s.end)));
            }
        }
        for w in segments.windows(2) {
            let (prev, next) = (w[0], w[1]);
            if next.start > prev.end + tol {
                return Err(Error::Parameter(format!("profile gap [{}, {})", prev.end, next.start)));
            }
            if next.start < prev.end - tol {
                return Err(Error::Parameter(format!("profile overlap [{}, {})", next.start, prev.end)));
            }
        }
        Ok(PiecewiseProfile { segments })
    }

    /// Constant `value` on `[0, length]`.
    pub fn uniform(length: f64, value: f64) -> Result<Self> {
        Self::new(vec![Segment::new(0.0, length, value)])
    }

    /// 5 °C / 10 °C / 20 °C blocks with breakpoints at 0.3 and 0.7 on `[0, 1]`.
    pub fn silicon_bar() -> Self {
        PiecewiseProfile {
            segments: vec![Segment::new(0.0, 0.3, 5.0), Segment::new(0.3, 0.7, 10.0), Segment::new(0.7, 1.0, 20.0)],
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn length(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    pub fn min_value(&self) -> f64 {
        self.segments.iter().map(|s| s.value).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.segments.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Interior breakpoints together with the endpoints `0` and `L`.
    pub fn breakpoints(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.segments.iter().map(|s| s.end)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let segments = self.segments.iter().map(|s| Segment { value: s.value * factor, ..*s }).collect();
        PiecewiseProfile { segments }
    }

    pub fn sample(&self, x: f64) -> Result<f64> {
        let length = self.length();
        if !(0.0..=length).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside [0, {length}]")));
        }
        let idx = self.segments.partition_point(|s| s.end <= x);
        Ok(self.segments[idx.min(self.segments.len() - 1)].value)
    }

    /// Exact integral of the profile over `[a, b] ⊆ [0, L]`.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        let length = self.length();
        if !(0.0 <= a && a <= b && b <= length) {
            return Err(Error::Domain(format!("interval [{a}, {b}] outside [0, {length}]")));
        }
        Ok(self
            .segments
            .iter()
            .map(|s| {
                let lo = s.start.max(a);
                let hi = s.end.min(b);
                if hi > lo {
                    s.value * (hi - lo)
                } else {
                    0.0
                }
            })
            .sum())
    }

    /// Σ C_j (b_j − a_j), the `k = 0` value of the transform.
    pub fn integral(&self) -> f64 {
        self.segments.iter().map(|s| s.value * (s.end - s.start)).sum()
    }

    pub fn transform(&self, k: f64) -> Result<SpectralAmplitude> {
        if !k.is_finite() {
            return Err(Error::Parameter(format!("wavenumber must be finite, got {k}")));
        }
        let series = k.abs() * self.length() < SMALL_K_SWITCH;
        let value = self.segments.iter().map(|s| s.kernel_integral(k, series) * s.value).sum();
        Ok(SpectralAmplitude { k, value })
    }

    /// Transforms `|k|` and conjugates for negative `k`, so the output is
    /// exactly Hermitian on symmetric grids.
    pub fn transform_grid(&self, ks: &[f64]) -> Result<Vec<SpectralAmplitude>> {
        ks.iter()
            .map(|&k| {
                let amp = self.transform(k.abs())?;
                let value = if k < 0.0 { amp.value.conj() } else { amp.value };
                Ok(SpectralAmplitude { k, value })
            })
            .collect()
    }
}
