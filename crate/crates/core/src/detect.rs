//! MAP symbol-by-symbol detectors in threshold form.
//!
//! Both detectors pick the nonzero point with the largest correlation
//! `Re(y~ x_k*)` and declare it only when a threshold test against the zero
//! symbol passes. `y~` is the received sample derotated by the phase of the
//! fading coefficient (coherent) or of the fading mean (noncoherent; the mean
//! is stored real so this is the identity).
//!
//! Ties go to the smallest symbol index.

use num_complex::Complex64;

use crate::channel::Rician;
use crate::modem::{DutyCycledConstellation, Scheme};
use crate::{Error, Result};

/// Detection threshold. `NegInfinity` arises at `nu = 1` (log of zero) and
/// means the zero symbol is never detected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Finite(f64),
    NegInfinity,
}

impl Threshold {
    fn from_value(t: f64) -> Self {
        if t == f64::NEG_INFINITY {
            Threshold::NegInfinity
        } else {
            Threshold::Finite(t)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Threshold::Finite(t) => Some(t),
            Threshold::NegInfinity => None,
        }
    }

    /// True when the zero symbol has a nonempty decision region.
    pub fn is_positive(self) -> bool {
        matches!(self, Threshold::Finite(t) if t > 0.0)
    }

    pub fn value(self) -> f64 {
        self.finite().unwrap_or(f64::NEG_INFINITY)
    }
}

/// Coherent threshold `T` and its normalised form.
///
/// The normalised threshold is `T_b = T sqrt(nu/P)` for OOBPSK and
/// `T_q = T sqrt(2 nu/P)` for OOQPSK, i.e. `T` divided by the per-dimension
/// amplitude of a nonzero point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentThresholds {
    pub scheme: Scheme,
    pub t: Threshold,
    pub normalized: Threshold,
}

impl CoherentThresholds {
    pub fn t_b(&self) -> Option<Threshold> {
        (self.scheme == Scheme::Oobpsk).then_some(self.normalized)
    }

    pub fn t_q(&self) -> Option<Threshold> {
        (self.scheme == Scheme::Ooqpsk).then_some(self.normalized)
    }
}

/// Per-dimension amplitude of the nonzero points.
pub(crate) fn dimension_amplitude(c: &DutyCycledConstellation) -> f64 {
    match c.scheme() {
        Scheme::Oobpsk => (c.power() / c.nu()).sqrt(),
        Scheme::Ooqpsk => (c.power() / (2.0 * c.nu())).sqrt(),
    }
}

/// `T = |h| P / (2 nu) + N0 / (2 |h|) ln(xi (1 - nu) / nu)`.
pub fn coherent_thresholds(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
) -> Result<CoherentThresholds> {
    if !(h_mag > 0.0 && h_mag.is_finite()) {
        return Err(Error::param(format!(
            "|h| = {h_mag} must be positive and finite"
        )));
    }
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::param(format!(
            "N0 = {n0} must be positive and finite"
        )));
    }
    let t = coherent_threshold_value(c, c.log_prior_ratio(), h_mag, n0);
    Ok(CoherentThresholds {
        scheme: c.scheme(),
        t: Threshold::from_value(t),
        normalized: Threshold::from_value(t / dimension_amplitude(c)),
    })
}

#[inline]
fn coherent_threshold_value(
    c: &DutyCycledConstellation,
    log_ratio: f64,
    h_mag: f64,
    n0: f64,
) -> f64 {
    0.5 * h_mag * c.power() / c.nu() + 0.5 * n0 / h_mag * log_ratio
}

/// Index of the nonzero point maximising `Re(y x_k*)`, and that maximum.
#[inline]
fn best_nonzero(c: &DutyCycledConstellation, y: Complex64) -> (usize, f64) {
    let mut best = (1, f64::NEG_INFINITY);
    for (k, p) in c.points().iter().enumerate().skip(1) {
        let s = (y * p.amplitude.conj()).re;
        if s > best.1 {
            best = (k, s);
        }
    }
    best
}

fn prior_only_decision(c: &DutyCycledConstellation) -> usize {
    if c.points()[0].prior >= c.points()[1].prior {
        0
    } else {
        1
    }
}

/// Coherent MAP detector for a fixed constellation and noise level.
#[derive(Debug, Clone)]
pub struct CoherentDetector {
    constellation: DutyCycledConstellation,
    n0: f64,
    log_ratio: f64,
}

impl CoherentDetector {
    pub fn new(c: &DutyCycledConstellation, n0: f64) -> Result<Self> {
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::param(format!(
                "N0 = {n0} must be positive and finite"
            )));
        }
        Ok(CoherentDetector {
            constellation: c.clone(),
            n0,
            log_ratio: c.log_prior_ratio(),
        })
    }

    /// Detected symbol index given the output `y` and the known fading `h`.
    ///
    /// With `h = 0` the output carries no information and the most likely
    /// symbol a priori is returned.
    pub fn detect(&self, y: Complex64, h: Complex64) -> usize {
        let c = &self.constellation;
        let h_mag = h.norm();
        if h_mag == 0.0 {
            return prior_only_decision(c);
        }
        let derotated = y * h.conj() / h_mag;
        let (k, s) = best_nonzero(c, derotated);
        if self.log_ratio == f64::NEG_INFINITY {
            return k;
        }
        if s > coherent_threshold_value(c, self.log_ratio, h_mag, self.n0) {
            k
        } else {
            0
        }
    }
}

/// Coherent MAP decision; see [`CoherentDetector`].
pub fn detect_coherent(
    y: Complex64,
    h: Complex64,
    c: &DutyCycledConstellation,
    n0: f64,
) -> Result<usize> {
    Ok(CoherentDetector::new(c, n0)?.detect(y, h))
}

/// Noncoherent threshold and the geometry of the zero-symbol decision region.
///
/// In the derotated I/Q plane the nonzero-vs-zero boundary is a circle of
/// squared radius `radius_sq` centred at `(-a, -a)` for OOQPSK or `(-a, 0)` for
/// OOBPSK (first-quadrant / right-half-plane copy; the other copies are
/// mirror images). For OOQPSK these are `A_q`, `C_q`, `D_q`:
/// `a = N0 |m| sqrt(nu/(2P)) / gamma^2`, `radius_sq = T nu/(gamma^2 P) + 2 a^2`,
/// `axis_crossing = sqrt(radius_sq - a^2) - a`. For OOBPSK
/// `a = N0 |m| sqrt(nu/P) / gamma^2`, `radius_sq = T nu/(gamma^2 P) + a^2`,
/// `axis_crossing = sqrt(radius_sq) - a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoncoherentThresholds {
    pub scheme: Scheme,
    pub t: Threshold,
    pub center_offset: f64,
    /// `None` when `T = -inf`.
    pub radius_sq: Option<f64>,
    /// Where the circle meets the axis (`u` axis at `v = 0` for OOBPSK,
    /// `v = 0` edge of the quadrant for OOQPSK); `None` when it does not.
    pub axis_crossing: Option<f64>,
}

impl NoncoherentThresholds {
    pub fn a_q(&self) -> f64 {
        self.center_offset
    }

    pub fn c_q(&self) -> Option<f64> {
        self.radius_sq
    }

    pub fn d_q(&self) -> Option<f64> {
        self.axis_crossing
    }
}

/// Noncoherent threshold
/// `T = N0 (P/nu) |m|^2 + N0 (gamma^2 P/nu + N0) ln(xi (1-nu)/nu (gamma^2 P/(nu N0) + 1))`
/// and the derived circle parameters.
pub fn noncoherent_thresholds(
    c: &DutyCycledConstellation,
    spec: &Rician,
    n0: f64,
) -> Result<NoncoherentThresholds> {
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::param(format!(
            "N0 = {n0} must be positive and finite"
        )));
    }
    let (p, nu) = (c.power(), c.nu());
    let (m, g2) = (spec.mean_magnitude(), spec.variance());
    let peak = p / nu;
    let t = n0 * peak * m * m
        + n0 * (g2 * peak + n0) * (c.log_prior_ratio() + (g2 * peak / n0).ln_1p());
    let t = Threshold::from_value(t);

    let a = n0 * m * dimension_amplitude(c) / (g2 * peak);
    let dims = match c.scheme() {
        Scheme::Oobpsk => 1.0,
        Scheme::Ooqpsk => 2.0,
    };
    let radius_sq = t.finite().map(|t| t / (g2 * peak) + dims * a * a);
    let axis_crossing = radius_sq.and_then(|r2| {
        let reach = r2 - (dims - 1.0) * a * a;
        (reach >= 0.0).then(|| reach.sqrt() - a)
    });
    Ok(NoncoherentThresholds {
        scheme: c.scheme(),
        t,
        center_offset: a,
        radius_sq,
        axis_crossing,
    })
}

/// Noncoherent MAP detector for Rician fading with known statistics.
#[derive(Debug, Clone)]
pub struct NoncoherentDetector {
    constellation: DutyCycledConstellation,
    energy_weight: f64,
    correlation_weight: f64,
    t: Threshold,
}

impl NoncoherentDetector {
    pub fn new(c: &DutyCycledConstellation, spec: &Rician, n0: f64) -> Result<Self> {
        let th = noncoherent_thresholds(c, spec, n0)?;
        Ok(NoncoherentDetector {
            constellation: c.clone(),
            energy_weight: spec.variance() * c.power() / c.nu(),
            correlation_weight: 2.0 * n0 * spec.mean_magnitude(),
            t: th.t,
        })
    }

    pub fn thresholds_t(&self) -> Threshold {
        self.t
    }

    /// Detected symbol index for output `y`.
    pub fn detect(&self, y: Complex64) -> usize {
        let (k, s) = best_nonzero(&self.constellation, y);
        match self.t {
            Threshold::NegInfinity => k,
            Threshold::Finite(t) => {
                if self.energy_weight * y.norm_sqr() + self.correlation_weight * s > t {
                    k
                } else {
                    0
                }
            }
        }
    }
}

/// Noncoherent MAP decision; see [`NoncoherentDetector`].
pub fn detect_noncoherent(
    y: Complex64,
    c: &DutyCycledConstellation,
    spec: &Rician,
    n0: f64,
) -> Result<usize> {
    Ok(NoncoherentDetector::new(c, spec, n0)?.detect(y))
}
