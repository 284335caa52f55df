use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("out of domain: {0}")]
    Domain(String),

    /// The k = 0 mode has no potential representation (ω² = 0).
    #[error("zero mode (k = 0) has no potential; use the observable path")]
    ZeroMode,

    #[error("regime {found} not supported here: {reason}")]
    Regime { found: &'static str, reason: &'static str },

    #[error("degenerate exponential rates: {0}")]
    Degenerate(String),

    #[error("finite-difference step too large: {0}")]
    Step(String),

    #[error("imaginary residual {residual:e} exceeds {limit:e} at t = {t}")]
    SymmetryViolation { t: f64, residual: f64, limit: f64 },

    #[error("stability bound violated: {0}")]
    Stability(String),

    #[error("front detection failed: {0}")]
    FrontDetection(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
