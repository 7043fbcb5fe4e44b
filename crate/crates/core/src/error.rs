use thiserror::Error;

use crate::tail::Regime;

/// Errors raised by the numerical and statistical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NotBracketed {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("non-finite value {value} at abscissa {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("operation requires a {expected} tail model, got {found:?}")]
    WrongRegime {
        expected: &'static str,
        found: Regime,
    },

    #[error("level {q} is outside the attainable range (b_inf = {b_inf})")]
    OutOfRange { q: f64, b_inf: f64 },

    #[error("parameter {param} = {value} sits on a branch boundary of the asymptotic formula")]
    BranchBoundary { param: &'static str, value: f64 },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_probability(name: &str, x: f64, open_low: bool, open_high: bool) -> Result<()> {
    let low_ok = if open_low { x > 0.0 } else { x >= 0.0 };
    let high_ok = if open_high { x < 1.0 } else { x <= 1.0 };
    if x.is_finite() && low_ok && high_ok {
        Ok(())
    } else {
        let lb = if open_low { '(' } else { '[' };
        let rb = if open_high { ')' } else { ']' };
        invalid(format!("{name} = {x} must lie in {lb}0, 1{rb}"))
    }
}
