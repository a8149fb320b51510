use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("no root found: {0}")]
    NoRootFound(String),

    #[error("too many roots: found {found}, at most {max} possible")]
    TooManyRoots { found: usize, max: usize },

    #[error("fiber map saturates at s = {0} (|s| exceeds the overflow guard)")]
    Saturation(f64),

    #[error("Gagliardo-Nirenberg constant C_q is required but was not supplied")]
    MissingGnConstant,

    #[error("dilated support radius {needed} escapes the grid (R_max = {r_max})")]
    SupportOverflow { needed: f64, r_max: f64 },

    #[error("operation undefined on the zero field")]
    ZeroField,

    #[error("regime error: {0}")]
    Regime(String),

    #[error("did not converge: {0}")]
    Convergence(String),

    #[error("mass mismatch: |W|_2^2 = {mass}, expected {c}")]
    MassMismatch { mass: f64, c: f64 },

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
