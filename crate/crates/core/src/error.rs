use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at z = {0}")]
    Pole(f64),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("integrator exceeded {max_steps} steps")]
    Convergence { max_steps: usize },
    #[error("integration window too short: sech({half_width}) = {tail:e} > 1e-9")]
    Truncation { half_width: f64, tail: f64 },
    #[error("closed form only available for phase 0 or pi, got {0}")]
    UnsupportedPhase(f64),
    #[error("state not normalized: |a|^2 + |b|^2 = {0}")]
    Normalization(f64),
    #[error("profile has no interior minimum")]
    NoMinimum,
    #[error("no half-depth crossing inside the scan range")]
    NoCrossing,
    #[error("likelihood is flat: all counts are {0}")]
    DegenerateData(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
