use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at t = {location}")]
    Pole { location: Complex64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("not a transformation function: residual {max_norm_coeff:e}")]
    NotTransformationFunction { max_norm_coeff: f64 },

    #[error("degenerate pair: the two transformation functions are proportional")]
    DegeneratePair,

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
