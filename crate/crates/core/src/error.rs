use thiserror::Error;

/// Errors raised by grid, projector and experiment operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Two operands live on different grids. Nothing is resampled.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The requested scale reads fewer than 2^J_ACC samples per translate.
    #[error("resolution error: scale {kappa} exceeds the admissible maximum {max}")]
    Resolution { kappa: u32, max: u32 },

    #[error("unsupported Daubechies order {0} (table covers 1..=10)")]
    UnsupportedOrder(usize),

    #[error("exponent p = {0} is outside the open range (1, inf) covered by the norm equivalence")]
    OutOfTheoremRange(f64),

    #[error("axis {axis} out of range for dimension {dim}")]
    Axis { axis: usize, dim: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
