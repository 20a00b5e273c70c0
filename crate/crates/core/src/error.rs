use nalgebra::DMatrix;
use thiserror::Error;

use crate::gaussian::Quadrature;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: must satisfy {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("unknown mode label `{0}`")]
    UnknownMode(String),

    #[error("mode label `{0}` appears more than once")]
    DuplicateMode(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not symplectic (max deviation {0:e})")]
    NotSymplectic(f64),

    #[error("measuring {quadrature} of mode `{mode}` is degenerate (variance {variance:e})")]
    DegenerateMeasurement {
        mode: String,
        quadrature: Quadrature,
        variance: f64,
    },

    #[error("unphysical state: smallest symplectic eigenvalue {0} is below 1")]
    Unphysical(f64),

    #[error("covariance matrix is not positive definite (smallest eigenvalue {0})")]
    NotPositiveDefinite(f64),

    /// The offending matrix is attached for diagnostics.
    #[error("numerical failure: {reason}")]
    Numerical { reason: String, matrix: DMatrix<f64> },

    #[error(
        "channel singularity: Eve's variance diverges at T = 1 \
         (distance {distance_km} km, excess noise {excess_noise})"
    )]
    ChannelSingularity { distance_km: f64, excess_noise: f64 },

    #[error("amplifier `{amplifier}` cannot be used with {detection} detection")]
    IncompatibleAmplifier {
        amplifier: &'static str,
        detection: &'static str,
    },

    #[error("key rate is not positive at the starting point {at} (K = {key_rate:e})")]
    NoPositiveKeyRate { at: f64, key_rate: f64 },

    #[error("root is not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    BracketFailure { lo: f64, f_lo: f64, hi: f64, f_hi: f64 },

    #[error("bisection stopped after {iterations} iterations with bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    constraint: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        })
    }
}
