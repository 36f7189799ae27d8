use alloc::string::String;

/// Errors raised by the engines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid loss: {0}")]
    InvalidLoss(String),
    #[error("invalid hypothesis family: {0}")]
    InvalidFamily(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension {0} (only d = 1 and d = 2 are supported here)")]
    UnsupportedDimension(usize),
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("unsupported reduction: {0}")]
    UnsupportedReduction(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("inapplicable: {0}")]
    Inapplicable(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! domain {
    ($($arg:tt)*) => { $crate::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
