use thiserror::Error;

/// Errors raised by the thinning library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A connected component is too large for the exact solver.
    #[error("connected component of {size} grains exceeds the exact-solver cap of {cap}")]
    ComponentTooLarge { size: usize, cap: usize },

    #[error("brute force enumeration is limited to {max} grains, got {got}")]
    TooManyGrains { got: usize, max: usize },

    #[error("unknown grain id {0}")]
    UnknownGrain(usize),

    #[error("radius law mismatch: {0}")]
    RadiusLawMismatch(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("thinning violates the hard-core constraint")]
    NotHardCore,
}

pub type Result<T> = std::result::Result<T, Error>;
