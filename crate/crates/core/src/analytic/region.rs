//! Error probability by direct 2-D integration over the noncoherent decision regions.
//!
//! The zero-symbol region is bounded: its first-quadrant (OOQPSK) or
//! right-half-plane (OOBPSK) piece is a disk centred at `(-a, -a)` or `(-a, 0)`
//! cut by the axes. The Gaussian output densities are integrated over that
//! piece in polar coordinates about the disk centre; everything else follows
//! from the symmetry of the constellation and a closed-form quadrant or
//! half-plane probability.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::channel::Rician;
use crate::detect::{dimension_amplitude, noncoherent_thresholds, Threshold};
use crate::modem::{build_constellation, Scheme};
use crate::numerics::{q, try_integrate, QuadratureSpec};
use crate::Result;

use super::{clamp_probability, one_minus_square_complement, ErrorEstimate, Method};

/// Isotropic 2-D Gaussian density.
#[inline]
fn gauss2(u: f64, v: f64, mean: (f64, f64), sigma: f64) -> f64 {
    let du = u - mean.0;
    let dv = v - mean.1;
    (-(du * du + dv * dv) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma)
}

/// Polar piece of a disk: angles `[theta_lo, theta_hi]`, radii `[r_min(theta), radius]`.
struct DiskPiece<F: Fn(f64) -> f64> {
    center: (f64, f64),
    radius: f64,
    theta_lo: f64,
    theta_hi: f64,
    r_min: F,
}

impl<F: Fn(f64) -> f64> DiskPiece<F> {
    fn probability(&self, mean: (f64, f64), sigma: f64, quad: &QuadratureSpec) -> Result<f64> {
        if !(self.theta_lo < self.theta_hi) {
            return Ok(0.0);
        }
        let inner = quad.inner();
        try_integrate(
            |theta| {
                let (s, c) = theta.sin_cos();
                let lo = (self.r_min)(theta).min(self.radius);
                try_integrate(
                    |r| {
                        let u = self.center.0 + r * c;
                        let v = self.center.1 + r * s;
                        Ok(gauss2(u, v, mean, sigma) * r)
                    },
                    lo,
                    self.radius,
                    &inner,
                )
            },
            self.theta_lo,
            self.theta_hi,
            quad,
        )
    }
}

/// Symbol error probability over the noncoherent Rician channel by 2-D region quadrature.
///
/// Works for both schemes; for OOQPSK it is an independent route to
/// [`super::pe_ooqpsk_noncoherent`].
pub fn pe_noncoherent_region_quadrature(
    scheme: Scheme,
    spec: &Rician,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    let c = build_constellation(scheme, nu, power)?;
    let th = noncoherent_thresholds(&c, spec, n0)?;
    let amp = dimension_amplitude(&c);
    let mu = spec.mean_magnitude() * amp;
    let sigma = (0.5 * (spec.variance() * c.peak_power() + n0)).sqrt();
    let sigma0 = (0.5 * n0).sqrt();
    let a = th.center_offset;

    // Probability mass of the zero region piece under x_0 and under x_1.
    let (mass0, mass1) = match (th.t, th.radius_sq) {
        (Threshold::Finite(t), Some(r2)) if t > 0.0 => {
            let radius = r2.sqrt();
            match scheme {
                Scheme::Ooqpsk => {
                    let mean1 = (mu, mu);
                    let (lo, hi) = if a == 0.0 {
                        (0.0, FRAC_PI_2)
                    } else {
                        ((a / radius).asin(), (a / radius).acos())
                    };
                    let lower = DiskPiece {
                        center: (-a, -a),
                        radius,
                        theta_lo: lo,
                        theta_hi: FRAC_PI_4.min(hi),
                        r_min: |th: f64| if a == 0.0 { 0.0 } else { a / th.sin() },
                    };
                    let upper = DiskPiece {
                        center: (-a, -a),
                        radius,
                        theta_lo: FRAC_PI_4.max(lo),
                        theta_hi: hi,
                        r_min: |th: f64| if a == 0.0 { 0.0 } else { a / th.cos() },
                    };
                    let m0 = lower.probability((0.0, 0.0), sigma0, quad)?
                        + upper.probability((0.0, 0.0), sigma0, quad)?;
                    let m1 = lower.probability(mean1, sigma, quad)?
                        + upper.probability(mean1, sigma, quad)?;
                    (m0, m1)
                }
                Scheme::Oobpsk => {
                    // Upper half of the piece; both densities are symmetric in v.
                    let hi = if a == 0.0 {
                        FRAC_PI_2
                    } else {
                        (a / radius).acos()
                    };
                    let piece = DiskPiece {
                        center: (-a, 0.0),
                        radius,
                        theta_lo: 0.0,
                        theta_hi: hi,
                        r_min: |th: f64| if a == 0.0 { 0.0 } else { a / th.cos() },
                    };
                    let m0 = 2.0 * piece.probability((0.0, 0.0), sigma0, quad)?;
                    let m1 = 2.0 * piece.probability((mu, 0.0), sigma, quad)?;
                    (m0, m1)
                }
            }
        }
        _ => (0.0, 0.0),
    };

    let (pe_x0, pe_x1) = match scheme {
        Scheme::Ooqpsk => (
            1.0 - 4.0 * mass0,
            one_minus_square_complement(q(mu / sigma)) + mass1,
        ),
        Scheme::Oobpsk => (1.0 - 2.0 * mass0, q(mu / sigma) + mass1),
    };
    let x0 = if nu < 1.0 { pe_x0 } else { 0.0 };
    Ok(ErrorEstimate::exact(
        clamp_probability((1.0 - nu) * x0 + nu * pe_x1),
        Method::RegionQuadrature,
    ))
}

/// Noncoherent OOBPSK symbol error probability by region quadrature.
pub fn pe_oobpsk_noncoherent_region_quadrature(
    spec: &Rician,
    nu: f64,
    power: f64,
    n0: f64,
    quad: &QuadratureSpec,
) -> Result<ErrorEstimate> {
    pe_noncoherent_region_quadrature(Scheme::Oobpsk, spec, nu, power, n0, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{normal_pdf, pe_ooqpsk_noncoherent};
    use crate::numerics::integrate;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::with_rel_tol(1e-9).unwrap()
    }

    #[test]
    fn matches_one_dimensional_ooqpsk_formula() {
        for k in [0.0, 5.0] {
            let spec = Rician::from_k_factor(k, 1.0).unwrap();
            for nu in [0.1, 0.5, 0.9, 1.0] {
                for n0 in [3.0, 0.3, 0.01] {
                    let two_d = pe_noncoherent_region_quadrature(
                        Scheme::Ooqpsk,
                        &spec,
                        nu,
                        1.0,
                        n0,
                        &quad(),
                    )
                    .unwrap();
                    let one_d =
                        pe_ooqpsk_noncoherent(&spec, nu, 1.0, n0, &QuadratureSpec::default())
                            .unwrap();
                    assert!(
                        (two_d.value - one_d.value).abs() < 1e-8,
                        "K={k} nu={nu} n0={n0}: {} vs {}",
                        two_d.value,
                        one_d.value
                    );
                    assert_eq!(two_d.method, Method::RegionQuadrature);
                }
            }
        }
    }

    /// Cartesian reduction of the OOBPSK half-disk: inner dimension via Q.
    fn oobpsk_oracle(spec: &Rician, nu: f64, n0: f64) -> f64 {
        let c = build_constellation(Scheme::Oobpsk, nu, 1.0).unwrap();
        let th = noncoherent_thresholds(&c, spec, n0).unwrap();
        let amp = dimension_amplitude(&c);
        let mu = spec.mean_magnitude() * amp;
        let sigma = (0.5 * (spec.variance() * amp * amp + n0)).sqrt();
        let sigma0 = (0.5 * n0).sqrt();
        let b = th.center_offset;
        let (pe0, pe1) = match th.t {
            Threshold::Finite(t) if t > 0.0 => {
                let r2 = th.radius_sq.unwrap();
                let d = r2.sqrt() - b;
                let chord =
                    |x: f64, s: f64| 1.0 - 2.0 * q((r2 - (x + b) * (x + b)).max(0.0).sqrt() / s);
                let q = QuadratureSpec::default();
                let i0 = integrate(
                    |x| chord(x, sigma0) * normal_pdf(x, 0.0, sigma0),
                    0.0,
                    d,
                    &q,
                )
                .unwrap();
                let i1 =
                    integrate(|x| chord(x, sigma) * normal_pdf(x, mu, sigma), 0.0, d, &q).unwrap();
                (1.0 - 2.0 * i0, crate::numerics::q(mu / sigma) + i1)
            }
            _ => (1.0, crate::numerics::q(mu / sigma)),
        };
        (1.0 - nu) * pe0 + nu * pe1
    }

    #[test]
    fn oobpsk_matches_cartesian_reduction() {
        for k in [0.0, 2.0, 5.0] {
            let spec = Rician::from_k_factor(k, 1.0).unwrap();
            for nu in [0.1, 0.5, 0.7, 1.0] {
                for n0 in [2.0, 0.2, 0.005] {
                    let got = pe_oobpsk_noncoherent_region_quadrature(&spec, nu, 1.0, n0, &quad())
                        .unwrap();
                    let want = oobpsk_oracle(&spec, nu, n0);
                    assert!(
                        (got.value - want).abs() < 1e-8,
                        "K={k} nu={nu} n0={n0}: {} vs {want}",
                        got.value
                    );
                }
            }
        }
    }

    #[test]
    fn oobpsk_low_snr_plateau() {
        let spec = Rician::from_k_factor(5.0, 1.0).unwrap();
        let pe = pe_oobpsk_noncoherent_region_quadrature(&spec, 0.5, 1.0, 1e4, &quad()).unwrap();
        assert!((pe.value - 0.5).abs() < 5e-3, "{}", pe.value);
    }

    #[test]
    fn unit_duty_bpsk_sign_error() {
        let spec = Rician::from_k_factor(3.0, 1.0).unwrap();
        let n0 = 0.25;
        let pe = pe_oobpsk_noncoherent_region_quadrature(&spec, 1.0, 1.0, n0, &quad()).unwrap();
        let mu = spec.mean_magnitude();
        let sigma = (0.5 * (spec.variance() + n0)).sqrt();
        assert!((pe.value - q(mu / sigma)).abs() < 1e-15);
    }
}
