//! Error probability of peaky (duty-cycled) PSK signaling over fading channels.
//!
//! The two modulations covered are on-off BPSK and on-off QPSK: with probability
//! `1 - nu` nothing is sent, otherwise a BPSK or QPSK point of power `P / nu`.
//! Small duty factors make the signal peaky (peak-to-average ratio `1 / nu`).
//!
//! The crate is organised bottom up:
//!
//! - [`numerics`]: Gaussian Q-function and adaptive quadrature.
//! - [`modem`]: constellations, priors, entropy and E_b/N_0 bookkeeping.
//! - [`channel`]: Rayleigh / Rician fading, AWGN, and the noncoherent output density.
//! - [`detect`]: MAP symbol detectors in threshold form, coherent and noncoherent.
//! - [`analytic`]: symbol error probabilities from the detector geometry.
//! - [`montecarlo`]: reproducible parallel simulation with Wilson intervals.
//! - [`sweep`]: grid evaluation, figure presets, CSV / JSON output (used by the `peaky` binary).
//!
//! ```
//! use peaky::{analytic, channel::FadingSpec, numerics::QuadratureSpec};
//!
//! // Ordinary BPSK (nu = 1) in Rayleigh fading at P/N0 = 10.
//! let pe = analytic::pe_oobpsk_coherent_avg(
//!     &FadingSpec::rayleigh(1.0).unwrap(), 1.0, 1.0, 0.1, &QuadratureSpec::default(),
//! ).unwrap();
//! assert!((pe.value - 0.5 * (1.0 - (10.0f64 / 11.0).sqrt())).abs() < 1e-9);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod detect;
mod error;
pub mod modem;
pub mod montecarlo;
pub mod numerics;
pub mod sweep;

pub use error::{Error, Result};
pub use num_complex::Complex64;
