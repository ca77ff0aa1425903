use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument was outside the range where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The dense oracle refuses problems above its size guard.
    #[error("problem too large for dense evaluation: N = {n} exceeds guard {guard}")]
    TooLarge { n: usize, guard: usize },
    /// Estimation was attempted with no usable data.
    #[error("estimate undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_transmission(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        domain(format!("transmission must lie in (0, 1], got {eta}"))
    }
}
