//! Symbol error probabilities from the MAP detector geometry.
//!
//! Coherent reception: the error probability conditioned on the fading
//! magnitude is a Q-function expression (OOBPSK) or a one-dimensional integral
//! of Q-functions (OOQPSK); it is then averaged over the fading power gain
//! `g = |h|^2`. Noncoherent Rician reception needs no fading average because
//! the output density already includes the fading.
//!
//! The correct-detection probabilities are available in their textbook form
//! (`pc_*`). The averaged results are computed from the equivalent error forms
//! (`1 - (1 - q)^2` written as `q (2 - q)`, complement regions integrated
//! directly), which keep full relative precision when `P_e` is small.

mod coherent;
mod noncoherent;
mod region;

use serde::{Deserialize, Serialize};

pub use coherent::{
    pc_ooqpsk_coherent_x0_given_h, pc_ooqpsk_coherent_x1_given_h, pe_coherent_avg_over_gain,
    pe_coherent_given_h, pe_oobpsk_coherent_avg, pe_oobpsk_coherent_given_h,
    pe_ooqpsk_coherent_avg, pe_ooqpsk_coherent_given_h, GainLaw, RayleighGain,
};
pub use noncoherent::{
    pc_ooqpsk_noncoherent_x0, pc_ooqpsk_noncoherent_x1, pe_ooqpsk_noncoherent,
    pe_ooqpsk_noncoherent_floor,
};
pub use region::{pe_noncoherent_region_quadrature, pe_oobpsk_noncoherent_region_quadrature};

/// How an error probability was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "analytic")]
    Analytic,
    #[serde(rename = "mc")]
    MonteCarlo,
    #[serde(rename = "region-quadrature")]
    RegionQuadrature,
}

/// A symbol error probability with its uncertainty.
///
/// Deterministic methods report `ci_low = ci_high = value` and `trials = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub method: Method,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
}

impl ErrorEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        let value = clamp_probability(value);
        ErrorEstimate {
            value,
            method,
            ci_low: value,
            ci_high: value,
            trials: 0,
        }
    }

    /// Whether `p` lies inside `[ci_low, ci_high]`.
    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

pub(crate) fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Beyond this many standard deviations a Gaussian density is below `f64` range.
const GAUSS_SUPPORT: f64 = 40.0;

/// Gaussian density with mean `mu` and standard deviation `sigma`.
#[inline]
pub(crate) fn normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// `[lo, hi]` clipped to where the Gaussian `N(mu, sigma^2)` has representable density.
pub(crate) fn gaussian_window(lo: f64, hi: f64, mu: f64, sigma: f64) -> (f64, f64) {
    let a = lo.max(mu - GAUSS_SUPPORT * sigma);
    let b = hi.min(mu + GAUSS_SUPPORT * sigma);
    if a < b {
        (a, b)
    } else {
        (a, a)
    }
}

/// `1 - (1 - q)^2` without cancellation.
#[inline]
pub(crate) fn one_minus_square_complement(q: f64) -> f64 {
    q * (2.0 - q)
}
