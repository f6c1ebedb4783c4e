use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} is singular at x = {x}")]
    Domain { what: &'static str, x: f64 },

    #[error("degenerate state at x = {x}: y and y' both vanish")]
    DegenerateState { x: f64 },

    #[error("out of range: {0}")]
    Range(String),

    #[error("step size underflow at x = {x} (step {step:e})")]
    StepUnderflow { x: f64, step: f64 },

    #[error("step budget of {max_steps} exhausted at x = {x}")]
    TooManySteps { x: f64, max_steps: usize },

    #[error("could not bracket the critical exponent for p = {p}, N = {n}: {reason}")]
    BracketFailure { p: f64, n: u32, reason: String },

    #[error("classification is not monotone in k near k = {k}")]
    NonMonotoneBracket { k: f64 },

    #[error("k = {k} is not critical: {reason}")]
    NotCritical { k: f64, reason: String },

    #[error("U exceeded the blow-up bound at x = {x} before reaching x_end = {x_end}")]
    BlowupBeforeEnd { x: f64, x_end: f64 },

    #[error("k = {k} does not reach the audit window end (blow-up at x = {x_blowup})")]
    ClassificationMismatch { k: f64, x_blowup: f64 },

    #[error("no convergence after {iterations} iterations (last update {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("experiment invariant violated: {0}")]
    Invariant(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Numerical failures (as opposed to bad inputs or I/O).
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter(_) | Error::Range(_) | Error::Io { .. }
        )
    }
}
