use crate::channel::Rician;
use crate::detect::{
    dimension_amplitude, noncoherent_thresholds, NoncoherentThresholds, Threshold,
};
use crate::modem::{build_constellation, DutyCycledConstellation, Scheme};
use crate::numerics::{q, try_integrate, QuadratureSpec};
use crate::{Error, Result};

use super::{
    clamp_probability, gaussian_window, normal_pdf, one_minus_square_complement, ErrorEstimate,
    Method,
};

/// OOQPSK geometry in the derotated plane for noncoherent Rician reception.
struct Geometry {
    /// Mean of each dimension given `x_1`.
    mu: f64,
    /// Per-dimension std given `x_1`: `sqrt(gamma^2 P/(2 nu) + N0/2)`.
    sigma: f64,
    /// Per-dimension noise std given `x_0`.
    sigma0: f64,
    th: NoncoherentThresholds,
}

impl Geometry {
    fn new(c: &DutyCycledConstellation, spec: &Rician, n0: f64) -> Result<Self> {
        let th = noncoherent_thresholds(c, spec, n0)?;
        let amp = dimension_amplitude(c);
        Ok(Geometry {
            mu: spec.mean_magnitude() * amp,
            sigma: (0.5 * (spec.variance() * c.peak_power() + n0)).sqrt(),
            sigma0: (0.5 * n0).sqrt(),
            th,
        })
    }

    /// Circle parameters `(A_q, C_q, D_q)` when `T > 0`.
    fn circle(&self) -> Option<(f64, f64, f64)> {
        match self.th.t {
            Threshold::Finite(t) if t > 0.0 => Some((
                self.th.center_offset,
                self.th.radius_sq.expect("finite threshold has a radius"),
                self.th
                    .axis_crossing
                    .expect("positive threshold crosses the axis"),
            )),
            _ => None,
        }
    }
}

/// Height of the zero region above the `u` axis at abscissa `x`: `sqrt(C - (x+A)^2) - A`.
#[inline]
fn boundary(x: f64, a: f64, c: f64) -> f64 {
    let r2 = c - (x + a) * (x + a);
    debug_assert!(
        r2 >= -1e-9 * c.abs().max(1e-300),
        "outside the circle: C - (x+A)^2 = {r2}"
    );
    r2.max(0.0).sqrt() - a
}

fn pc_x1(g: &Geometry, quad: &QuadratureSpec) -> Result<f64> {
    let on_axis = 1.0 - q(g.mu / g.sigma);
    match g.circle() {
        Some((a, c, d)) => {
            let (lo, hi) = gaussian_window(0.0, d, g.mu, g.sigma);
            let integral = try_integrate(
                |x| Ok(q((boundary(x, a, c) - g.mu) / g.sigma) * normal_pdf(x, g.mu, g.sigma)),
                lo,
                hi,
                quad,
            )?;
            Ok(on_axis * q((d - g.mu) / g.sigma) + integral)
        }
        None => Ok(on_axis * on_axis),
    }
}

fn pc_x0(g: &Geometry, quad: &QuadratureSpec) -> Result<f64> {
    match g.circle() {
        Some((a, c, d)) => {
            let (lo, hi) = gaussian_window(0.0, d, 0.0, g.sigma0);
            let integral = try_integrate(
                |x| Ok((0.5 - q(boundary(x, a, c) / g.sigma0)) * normal_pdf(x, 0.0, g.sigma0)),
                lo,
                hi,
                quad,
            )?;
            Ok(4.0 * integral)
        }
        None => Ok(0.0),
    }
}

fn pe_x1(g: &Geometry, quad: &QuadratureSpec) -> Result<f64> {
    let q_axis = q(g.mu / g.sigma);
    let quadrant = one_minus_square_complement(q_axis);
    match g.circle() {
        Some((a, c, d)) => {
            let (lo, hi) = gaussian_window(0.0, d, g.mu, g.sigma);
            let integral = try_integrate(
                |x| {
                    let excess = q((g.mu - boundary(x, a, c)) / g.sigma) - q_axis;
                    Ok(excess.max(0.0) * normal_pdf(x, g.mu, g.sigma))
                },
                lo,
                hi,
                quad,
            )?;
            Ok(quadrant + integral)
        }
        None => Ok(quadrant),
    }
}

fn pe_x0(g: &Geometry, quad: &QuadratureSpec) -> Result<f64> {
    match g.circle() {
        Some((a, c, d)) => {
            let (lo, hi) = gaussian_window(0.0, d, 0.0, g.sigma0);
            let integral = try_integrate(
                |x| Ok(q(boundary(x, a, c) / g.sigma0) * normal_pdf(x, 0.0, g.sigma0)),
                lo,
                hi,
                quad,
            )?;
            Ok(2.0 * q(d / g.sigma0) + 4.0 * integral)
        }
        None => Ok(1.0),
    }
}

/// Noncoherent OOQPSK correct-detection probability given a nonzero point.
pub fn pc_ooqpsk_noncoherent_x1(
    spec: &Rician,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let c = build_constellation(Scheme::Ooqpsk, nu, power)?;
    pc_x1(&Geometry::new(&c, spec, n0)?, quad)
}

/// Noncoherent OOQPSK correct-detection probability given the zero symbol.
pub fn pc_ooqpsk_noncoherent_x0(
    spec: &Rician,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let c = build_constellation(Scheme::Ooqpsk, nu, power)?;
    pc_x0(&Geometry::new(&c, spec, n0)?, quad)
}

/// Symbol error probability of OOQPSK over the noncoherent Rician channel.
pub fn pe_ooqpsk_noncoherent(
    spec: &Rician,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    let c = build_constellation(Scheme::Ooqpsk, nu, power)?;
    let g = Geometry::new(&c, spec, n0)?;
    let x1 = pe_x1(&g, quad)?;
    let x0 = if nu < 1.0 { pe_x0(&g, quad)? } else { 0.0 };
    Ok(ErrorEstimate::exact(
        clamp_probability((1.0 - nu) * x0 + nu * x1),
        Method::Analytic,
    ))
}

/// High-SNR error floor `nu (1 - (1 - Q(sqrt K))^2)` of noncoherent OOQPSK.
pub fn pe_ooqpsk_noncoherent_floor(k: f64, nu: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::param(format!("Rician factor K = {k} must be >= 0")));
    }
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::param(format!(
            "duty factor nu = {nu} is outside (0, 1]"
        )));
    }
    Ok(nu * one_minus_square_complement(q(k.sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn unit_duty_is_threshold_free() {
        let spec = Rician::from_k_factor(5.0, 1.0).unwrap();
        for n0 in [10.0, 1.0, 0.01] {
            let mu = spec.mean_magnitude() * (0.5f64).sqrt();
            let sigma = (0.5 * (spec.variance() + n0)).sqrt();
            let on_axis = 1.0 - q(mu / sigma);
            let pe = pe_ooqpsk_noncoherent(&spec, 1.0, 1.0, n0, &quad()).unwrap();
            assert!((pe.value - (1.0 - on_axis * on_axis)).abs() < 1e-15);
        }
    }

    #[test]
    fn floor_values() {
        assert_eq!(
            pe_ooqpsk_noncoherent_floor(f64::INFINITY, 0.3).unwrap(),
            0.0
        );
        assert!((pe_ooqpsk_noncoherent_floor(0.0, 0.4).unwrap() - 0.3).abs() < 1e-15);
        let floor = pe_ooqpsk_noncoherent_floor(5.0, 0.1).unwrap();
        assert!((floor - 2.5186697036e-3).abs() < 1e-12);
        assert!(pe_ooqpsk_noncoherent_floor(-1.0, 0.1).is_err());
        assert!(pe_ooqpsk_noncoherent_floor(1.0, 0.0).is_err());
    }

    #[test]
    fn correct_and_error_forms_agree() {
        for k in [0.0, 1.0, 5.0, 20.0] {
            let spec = Rician::from_k_factor(k, 1.0).unwrap();
            for nu in [0.05, 0.1, 0.5, 0.79, 0.9] {
                for n0 in [5.0, 0.5, 0.01, 1e-5] {
                    let c = build_constellation(Scheme::Ooqpsk, nu, 1.0).unwrap();
                    let g = Geometry::new(&c, &spec, n0).unwrap();
                    let s1 = pc_x1(&g, &quad()).unwrap() + pe_x1(&g, &quad()).unwrap();
                    let s0 = pc_x0(&g, &quad()).unwrap() + pe_x0(&g, &quad()).unwrap();
                    assert!((s1 - 1.0).abs() < 1e-11, "x1 K={k} nu={nu} n0={n0}: {s1}");
                    assert!((s0 - 1.0).abs() < 1e-11, "x0 K={k} nu={nu} n0={n0}: {s0}");
                }
            }
        }
    }

    #[test]
    fn vanishing_noise_reaches_the_floor() {
        for (k, nu) in [(5.0, 0.1), (5.0, 0.5), (1.0, 0.3), (10.0, 0.9)] {
            let spec = Rician::from_k_factor(k, 1.0).unwrap();
            let floor = pe_ooqpsk_noncoherent_floor(k, nu).unwrap();
            let pe = pe_ooqpsk_noncoherent(&spec, nu, 1.0, 1e-9, &quad()).unwrap();
            assert!(
                (pe.value / floor - 1.0).abs() < 1e-3,
                "K={k} nu={nu}: {} vs {floor}",
                pe.value
            );
        }
    }
}
