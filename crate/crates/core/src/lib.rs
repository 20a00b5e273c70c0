//! Covariance-matrix security analysis of two-way continuous-variable QKD
//! with phase-sensitive and phase-insensitive amplifiers at Bob's receiver.
//!
//! All variances are in shot-noise units and quadratures are ordered
//! `(x1, p1, x2, p2, ...)`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod gaussian;
pub mod keyrate;
pub mod montecarlo;
pub mod protocol;

pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, Quadrature, SymplecticSpectrum, SymplecticTransform};
pub use keyrate::{secret_key_rate, KeyRateResult};
pub use protocol::{AmplifierSpec, ChannelModel, Detection, DetectorModel, ProtocolParams};
