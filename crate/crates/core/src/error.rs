use thiserror::Error;

/// Errors shared across schedule construction, dynamics integration, and the
/// counting harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside its admissible interval.
    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A (M, N) pair that does not describe a valid instance.
    #[error("invalid counts: require M <= N and N >= 1, got M = {m}, N = {n}")]
    InvalidCounts { m: u64, n: u64 },

    /// An input that makes the requested quantity undefined.
    #[error("degenerate input: {what}")]
    Degenerate { what: &'static str },

    /// State-vector length does not match the instance dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Full-state evolution requested above the configured size cap.
    #[error("database size {n} exceeds the full-state cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    /// The adaptive integrator could not make progress.
    #[error("integrator step underflow at {var} = {at:.12e} (step {step:.3e})")]
    StepUnderflow {
        var: &'static str,
        at: f64,
        step: f64,
    },

    /// The adaptive integrator exhausted its step budget.
    #[error("integrator exceeded {max_steps} steps at {var} = {at:.12e}")]
    TooManySteps {
        var: &'static str,
        at: f64,
        max_steps: u64,
    },

    /// Norm conservation was violated beyond the permitted drift.
    #[error("norm drift {drift:.3e} exceeds limit {limit:.3e} at {var} = {at:.6}")]
    NormDrift {
        var: &'static str,
        at: f64,
        drift: f64,
        limit: f64,
    },

    /// A sweep configuration problem, with the offending location.
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
