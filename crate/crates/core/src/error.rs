//! Error type shared by all library modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Hermite-Gauss order above the configured recursion cap.
    #[error("unsupported Hermite-Gauss order {order} (cap is {cap})")]
    UnsupportedOrder { order: usize, cap: usize },

    /// A quadrature window failed its tail-mass check.
    #[error("quadrature accuracy: {0}")]
    Accuracy(String),

    /// Inconsistent or incomplete configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Fewer calibration points than basis functions.
    #[error("underdetermined calibration: {points} points for {unknowns} basis functions")]
    Underdetermined { points: usize, unknowns: usize },

    /// Design matrix is rank-deficient under the pseudo-inverse cutoff.
    #[error("singular calibration: smallest singular value {smallest:.3e}")]
    SingularCalibration { smallest: f64 },

    /// Separation outside the calibrated prediction range.
    #[error("separation {separation:.6} outside calibrated range [0, {max:.6}]")]
    Extrapolation { separation: f64, max: f64 },

    /// Not enough counts to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
