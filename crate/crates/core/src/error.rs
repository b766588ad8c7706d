use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("D = {0} is not one of the nine class-number-one fields")]
    UnsupportedField(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{function} has a pole at s = {at}")]
    Pole {
        function: &'static str,
        at: Complex64,
    },

    #[error("{function}: argument {at} is outside the supported region")]
    OutOfRegion {
        function: &'static str,
        at: Complex64,
    },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("quadrature did not converge (last refinement delta {delta:e})")]
    NoConvergence { delta: f64 },

    #[error("zero bracket refinement failed on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("reduction did not terminate within {0} steps")]
    ReductionCap(usize),

    #[error("region is not certified to lie inside the fundamental domain")]
    UncertifiedRegion,

    #[error("height y = {y} is outside the evaluator range [{lo}, {hi}]")]
    OutOfGrid { y: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
