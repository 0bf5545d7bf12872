use thiserror::Error;

use crate::model::Mode;

/// Errors raised by the linear algebra, model and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not Hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace {0} exceeds 1")]
    TraceExceedsOne(f64),

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("proper time must be finite and non-negative, got {0}")]
    InvalidTau(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("initial amplitude of the {0} mode vanishes, its conditional pion state is undefined")]
    DegenerateAmplitude(Mode),

    #[error("decay widths are degenerate (gamma_s = {gamma_s}, gamma_l = {gamma_l})")]
    DegenerateWidths { gamma_s: f64, gamma_l: f64 },

    #[error("closed form requires alpha = beta = 1/sqrt(2), got alpha = {alpha}, beta = {beta}")]
    NonCanonicalAmplitudes { alpha: String, beta: String },

    #[error("Kraus operators are not complete (residual {0:e})")]
    IncompleteKraus(f64),

    #[error("invalid scan configuration: {0}")]
    InvalidScan(String),

    #[error("series needs at least 2 points, got {0}")]
    SeriesTooShort(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
