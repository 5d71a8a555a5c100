//! Single-carrier uplink transmission into a large antenna array.
//!
//! The crate contains the pieces of a link-level simulator and the matching
//! closed-form residual-ISI theory:
//!
//! - [`specfun`]: Bessel functions, adaptive quadrature, Cholesky, seeded Gaussians
//! - [`channel`]: power delay profiles, ULA spatial correlation, Rayleigh tap gains
//! - [`waveform`]: QPSK symbols, (root-)raised-cosine pulses, burst synthesis and propagation
//! - [`receiver`]: per-tap matched-filter bank, linear combining and baud-rate slicing
//! - [`analysis`]: SNR expressions, `P0`, residual-ISI power and the discrete impulse response

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod receiver;
pub mod specfun;
pub mod waveform;

pub use num_complex::Complex64;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Numeric(#[from] specfun::SpecfunError),

    #[error("invalid power delay profile: {0}")]
    Profile(String),

    #[error("invalid array geometry: {0}")]
    Geometry(String),

    #[error("invalid pulse shape: {0}")]
    Pulse(String),

    #[error("tap index {index} out of range for {taps} taps")]
    TapIndex { index: usize, taps: usize },

    #[error("bit count {0} is odd")]
    OddBitCount(usize),

    #[error("empty symbol stream")]
    EmptySymbols,

    #[error("delay of {delay_samples} samples does not fit a window of {available} samples")]
    DelayBeyondWindow { delay_samples: usize, available: usize },

    #[error("waveforms are on different sample grids")]
    GridMismatch,

    #[error("expected {expected} antenna waveforms, got {actual}")]
    AntennaCount { expected: usize, actual: usize },

    #[error("invalid combiner weights: {0}")]
    Weights(String),

    #[error("baud instant {index} lies outside the waveform")]
    OutOfWindow { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
