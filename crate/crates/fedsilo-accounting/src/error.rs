use thiserror::Error;

/// Errors raised by the accountant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AccountingError {
    #[error("RDP order must be > 1, got {0}")]
    BadOrder(f64),
    #[error("noise multiplier must be > 0, got {0}")]
    BadSigma(f64),
    #[error("sampling rate must lie in [0, 1], got {0}")]
    BadSamplingRate(f64),
    #[error("delta must lie strictly in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("privacy loss must be >= 0, got {0}")]
    BadRho(f64),
    #[error("curve must be non-empty")]
    EmptyCurve,
    #[error("orders ({orders}) and losses ({rhos}) differ in length")]
    LengthMismatch { orders: usize, rhos: usize },
    #[error("curves do not share the same order grid")]
    GridMismatch,
    #[error("group exponent must be >= 1, got {0}")]
    BadGroupExponent(u32),
    #[error("group size must be >= 1, got {0}")]
    BadGroupSize(u32),
    #[error("no grid order satisfies alpha >= {0}; widen the order grid")]
    EmptyConvertibleGrid(f64),
    #[error("composition count must be >= 1")]
    BadSteps,
    #[error("epsilon search did not converge after {0} iterations")]
    SearchDidNotConverge(u32),
}
