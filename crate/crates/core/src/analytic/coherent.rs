use crate::channel::FadingSpec;
use crate::detect::{coherent_thresholds, dimension_amplitude, Threshold};
use crate::modem::{build_constellation, DutyCycledConstellation, Scheme};
use crate::numerics::{q, try_integrate, try_integrate_semi_infinite, QuadratureSpec};
use crate::{Error, Result};

use super::{
    clamp_probability, gaussian_window, normal_pdf, one_minus_square_complement, ErrorEstimate,
    Method,
};

/// Distribution of the fading power gain `g = |h|^2`.
pub trait GainLaw {
    fn density(&self, g: f64) -> f64;
    /// `P(|h|^2 > g)`; used as the truncation bound since conditional error
    /// probabilities never exceed 1.
    fn tail_mass(&self, g: f64) -> f64;
}

/// Rayleigh fading: `|h|^2` exponential with the given mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighGain {
    pub mean_square: f64,
}

impl GainLaw for RayleighGain {
    fn density(&self, g: f64) -> f64 {
        (-g / self.mean_square).exp() / self.mean_square
    }

    fn tail_mass(&self, g: f64) -> f64 {
        (-g / self.mean_square).exp()
    }
}

/// Per-dimension statistics of the derotated output given `x_1` was sent.
struct Geometry {
    mu: f64,
    sigma: f64,
    t: Threshold,
}

fn geometry(c: &DutyCycledConstellation, h_mag: f64, n0: f64) -> Result<Geometry> {
    let th = coherent_thresholds(c, h_mag, n0)?;
    Ok(Geometry {
        mu: h_mag * dimension_amplitude(c),
        sigma: (0.5 * n0).sqrt(),
        t: th.normalized,
    })
}

fn oobpsk_pe(c: &DutyCycledConstellation, h_mag: f64, n0: f64) -> Result<f64> {
    let g = geometry(c, h_mag, n0)?;
    let nu = c.nu();
    let snr = g.mu / g.sigma;
    let pe = match g.t {
        Threshold::Finite(tb) if tb > 0.0 => {
            let scaled = tb / g.sigma;
            (1.0 - nu) * 2.0 * q(scaled) + nu * q(snr - scaled)
        }
        _ => (1.0 - nu) + nu * q(snr),
    };
    Ok(clamp_probability(pe))
}

/// Coherent OOBPSK symbol error probability for a fixed fading magnitude.
///
/// With `T_b > 0`: `(1-nu) 2 Q(T_b sqrt(2/N0)) + nu Q(sqrt(2|h|^2 P/(nu N0)) - T_b sqrt(2/N0))`;
/// otherwise `(1-nu) + nu Q(sqrt(2|h|^2 P/(nu N0)))`.
pub fn pe_oobpsk_coherent_given_h(h_mag: f64, nu: f64, power: f64, n0: f64) -> Result<f64> {
    let c = build_constellation(Scheme::Oobpsk, nu, power)?;
    oobpsk_pe(&c, h_mag, n0)
}

fn ooqpsk_pc_x1(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let g = geometry(c, h_mag, n0)?;
    let on_axis = 1.0 - q(g.mu / g.sigma);
    match g.t {
        Threshold::Finite(tq) if tq > 0.0 => {
            let (lo, hi) = gaussian_window(0.0, tq, g.mu, g.sigma);
            let integral = try_integrate(
                |x| Ok(q((tq - x - g.mu) / g.sigma) * normal_pdf(x, g.mu, g.sigma)),
                lo,
                hi,
                quad,
            )?;
            Ok(on_axis * q((tq - g.mu) / g.sigma) + integral)
        }
        _ => Ok(on_axis * on_axis),
    }
}

fn ooqpsk_pc_x0(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let g = geometry(c, h_mag, n0)?;
    match g.t {
        Threshold::Finite(tq) if tq > 0.0 => {
            let (lo, hi) = gaussian_window(0.0, tq, 0.0, g.sigma);
            let integral = try_integrate(
                |x| Ok((0.5 - q((tq - x) / g.sigma)) * normal_pdf(x, 0.0, g.sigma)),
                lo,
                hi,
                quad,
            )?;
            Ok(4.0 * integral)
        }
        _ => Ok(0.0),
    }
}

/// Error given `x_1`, as `q (2 - q) + ∫_0^{T_q} [Q((mu - T_q + x)/sigma) - q] phi(x) dx`.
fn ooqpsk_pe_x1(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let g = geometry(c, h_mag, n0)?;
    let q_axis = q(g.mu / g.sigma);
    let quadrant = one_minus_square_complement(q_axis);
    match g.t {
        Threshold::Finite(tq) if tq > 0.0 => {
            let (lo, hi) = gaussian_window(0.0, tq, g.mu, g.sigma);
            let integral = try_integrate(
                |x| {
                    Ok((q((g.mu - tq + x) / g.sigma) - q_axis).max(0.0)
                        * normal_pdf(x, g.mu, g.sigma))
                },
                lo,
                hi,
                quad,
            )?;
            Ok(quadrant + integral)
        }
        _ => Ok(quadrant),
    }
}

/// Error given `x_0`, as `2 Q(T_q/sigma) + 4 ∫_0^{T_q} Q((T_q - x)/sigma) phi_0(x) dx`.
fn ooqpsk_pe_x0(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let g = geometry(c, h_mag, n0)?;
    match g.t {
        Threshold::Finite(tq) if tq > 0.0 => {
            let (lo, hi) = gaussian_window(0.0, tq, 0.0, g.sigma);
            let integral = try_integrate(
                |x| Ok(q((tq - x) / g.sigma) * normal_pdf(x, 0.0, g.sigma)),
                lo,
                hi,
                quad,
            )?;
            Ok(2.0 * q(tq / g.sigma) + 4.0 * integral)
        }
        _ => Ok(1.0),
    }
}

fn ooqpsk_pe(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let nu = c.nu();
    let x1 = ooqpsk_pe_x1(c, h_mag, n0, quad)?;
    let x0 = if nu < 1.0 {
        ooqpsk_pe_x0(c, h_mag, n0, quad)?
    } else {
        0.0
    };
    Ok(clamp_probability((1.0 - nu) * x0 + nu * x1))
}

/// Coherent OOQPSK correct-detection probability given `x_1` (any nonzero point) and `|h|`.
pub fn pc_ooqpsk_coherent_x1_given_h(
    h_mag: f64,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let c = build_constellation(Scheme::Ooqpsk, nu, power)?;
    ooqpsk_pc_x1(&c, h_mag, n0, quad)
}

/// Coherent OOQPSK correct-detection probability given the zero symbol and `|h|`.
pub fn pc_ooqpsk_coherent_x0_given_h(
    h_mag: f64,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let c = build_constellation(Scheme::Ooqpsk, nu, power)?;
    ooqpsk_pc_x0(&c, h_mag, n0, quad)
}

/// Coherent OOQPSK symbol error probability for a fixed fading magnitude,
/// `1 - ((1-nu) P_c|x0 + nu P_c|x1)`.
pub fn pe_ooqpsk_coherent_given_h(
    h_mag: f64,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let c = build_constellation(Scheme::Ooqpsk, nu, power)?;
    ooqpsk_pe(&c, h_mag, n0, quad)
}

/// Conditional error probability for either scheme.
pub fn pe_coherent_given_h(
    c: &DutyCycledConstellation,
    h_mag: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    match c.scheme() {
        Scheme::Oobpsk => oobpsk_pe(c, h_mag, n0),
        Scheme::Ooqpsk => ooqpsk_pe(c, h_mag, n0, quad),
    }
}

/// Averages the conditional error probability over a fading power-gain law.
///
/// The conditional probability is evaluated with the inner tolerance budget
/// (1/100 of `quad`); the outer integral over `g` is truncated where the
/// remaining fading mass drops below `quad.abs_tol`.
pub fn pe_coherent_avg_over_gain(
    scheme: Scheme,
    law: &dyn GainLaw,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    let c = build_constellation(scheme, nu, power)?;
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::param(format!(
            "N0 = {n0} must be positive and finite"
        )));
    }
    let inner = quad.inner();
    let value = try_integrate_semi_infinite(
        |g| {
            let density = law.density(g);
            if density == 0.0 {
                return Ok(0.0);
            }
            Ok(pe_coherent_given_h(&c, g.sqrt(), n0, &inner)? * density)
        },
        0.0,
        |g| law.tail_mass(g),
        quad,
    )?;
    Ok(ErrorEstimate::exact(value, Method::Analytic))
}

fn gain_law(spec: &FadingSpec) -> Result<RayleighGain> {
    match *spec {
        FadingSpec::Rayleigh { mean_square } => Ok(RayleighGain { mean_square }),
        FadingSpec::Rician(_) => Err(Error::Unsupported(
            "analytic coherent average over Rician fading (use pe_coherent_avg_over_gain with a custom GainLaw, or Monte Carlo)"
                .into(),
        )),
    }
}

/// Coherent OOBPSK symbol error probability averaged over Rayleigh fading.
pub fn pe_oobpsk_coherent_avg(
    spec: &FadingSpec,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    pe_coherent_avg_over_gain(Scheme::Oobpsk, &gain_law(spec)?, nu, power, n0, quad)
}

/// Coherent OOQPSK symbol error probability averaged over Rayleigh fading.
pub fn pe_ooqpsk_coherent_avg(
    spec: &FadingSpec,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    pe_coherent_avg_over_gain(Scheme::Ooqpsk, &gain_law(spec)?, nu, power, n0, quad)
}
