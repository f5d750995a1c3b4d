use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: {reason}")]
    InvalidInterval { a: f64, b: f64, reason: &'static str },

    #[error("invalid piecewise-linear function: {0}")]
    InvalidPl(String),

    #[error("sample count {0} is not a power of two >= 2")]
    InvalidGridSize(usize),

    #[error("function must be real-valued (imaginary part at knot {index} is {imag})")]
    NotReal { index: usize, imag: f64 },

    #[error("function must be periodic for this operation")]
    NotPeriodic,

    #[error("max frequency {kmax} too large for {n} samples (need 2*kmax < n)")]
    Aliasing { kmax: usize, n: usize },

    #[error("invalid modulus of continuity: {0}")]
    InvalidModulus(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invalid homeomorphism: {0}")]
    InvalidHomeo(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
