use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension {0}: d must be at least 2")]
    InvalidDimension(usize),

    #[error("dimension {0} is not prime; only prime d is supported here")]
    NotPrime(usize),

    #[error("dimension mismatch: expected d = {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index component {value} out of range for d = {d}")]
    IndexOutOfRange { value: usize, d: usize },

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("coefficients are not a probability distribution: {0}")]
    NotNormalized(String),

    #[error("success probability vanished; no outcome survives post-selection")]
    ZeroSuccessProbability,

    #[error("oracle size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("invalid state description: {0}")]
    Parse(String),
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
