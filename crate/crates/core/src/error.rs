use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("x = {x} outside curve domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is singular or ill-conditioned (condition estimate {0:.3e})")]
    IllConditioned(f64),

    #[error("no closed form for these parameters ({0}); use the LP path")]
    NoClosedForm(String),

    #[error("outside the stated scope: {0}")]
    OutOfScope(String),

    #[error("linear program {0}")]
    Lp(String),

    #[error("not enough usable points: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
