//! Duty-cycled PSK constellations.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// On-off modulation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// On-off BPSK: zero, `+sqrt(P/nu)`, `-sqrt(P/nu)`.
    Oobpsk,
    /// On-off QPSK: zero and `sqrt(P/(2 nu)) (±1 ± j)`.
    Ooqpsk,
}

impl Scheme {
    /// Number of nonzero points; also the `xi` constant in the detection thresholds.
    pub fn xi(self) -> usize {
        match self {
            Scheme::Oobpsk => 2,
            Scheme::Ooqpsk => 4,
        }
    }

    /// Duty factor at which the threshold log term `ln(xi (1 - nu) / nu)` vanishes.
    pub fn threshold_crossover(self) -> f64 {
        let xi = self.xi() as f64;
        xi / (xi + 1.0)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Oobpsk => "oobpsk",
            Scheme::Ooqpsk => "ooqpsk",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oobpsk" => Ok(Scheme::Oobpsk),
            "ooqpsk" => Ok(Scheme::Ooqpsk),
            _ => Err(Error::param(format!(
                "unknown scheme '{s}' (expected oobpsk or ooqpsk)"
            ))),
        }
    }
}

/// A constellation point and its prior probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub amplitude: Complex64,
    pub prior: f64,
}

/// On-off PSK constellation with duty factor `nu` and average power `P`.
///
/// Point 0 is always the zero symbol. OOBPSK then lists `+`, `-`; OOQPSK lists
/// the quadrants counterclockwise starting at `1 + j`. With `nu = 1` the zero
/// point is kept with prior 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DutyCycledConstellation {
    scheme: Scheme,
    nu: f64,
    power: f64,
    points: Vec<Point>,
}

impl DutyCycledConstellation {
    pub fn new(scheme: Scheme, nu: f64, power: f64) -> Result<Self> {
        build_constellation(scheme, nu, power)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn xi(&self) -> usize {
        self.scheme.xi()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `P / nu`, the power of every nonzero point.
    pub fn peak_power(&self) -> f64 {
        self.power / self.nu
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.peak_power().sqrt()
    }

    pub fn peak_to_average_ratio(&self) -> f64 {
        1.0 / self.nu
    }

    /// `ln(xi (1 - nu) / nu)`; `-inf` when `nu = 1`.
    pub fn log_prior_ratio(&self) -> f64 {
        (self.xi() as f64 * (1.0 - self.nu) / self.nu).ln()
    }
}

/// Builds the OOBPSK or OOQPSK constellation for duty factor `nu` and power `P`.
pub fn build_constellation(scheme: Scheme, nu: f64, power: f64) -> Result<DutyCycledConstellation> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::param(format!(
            "duty factor nu = {nu} is outside (0, 1]"
        )));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::param(format!(
            "average power P = {power} must be positive and finite"
        )));
    }
    let xi = scheme.xi() as f64;
    let nonzero_prior = nu / xi;
    let mut points = vec![Point {
        amplitude: Complex64::new(0.0, 0.0),
        prior: 1.0 - nu,
    }];
    match scheme {
        Scheme::Oobpsk => {
            let a = (power / nu).sqrt();
            for s in [1.0, -1.0] {
                points.push(Point {
                    amplitude: Complex64::new(s * a, 0.0),
                    prior: nonzero_prior,
                });
            }
        }
        Scheme::Ooqpsk => {
            let a = (power / (2.0 * nu)).sqrt();
            for (re, im) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
                points.push(Point {
                    amplitude: Complex64::new(re * a, im * a),
                    prior: nonzero_prior,
                });
            }
        }
    }
    Ok(DutyCycledConstellation {
        scheme,
        nu,
        power,
        points,
    })
}

/// Symbol entropy in bits, with `0 log 0 = 0`.
pub fn entropy_bits(c: &DutyCycledConstellation) -> f64 {
    c.points
        .iter()
        .map(|p| p.prior)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum()
}

/// SNR per bit, `10 log10(P / (N0 H))` with `H` the symbol entropy in bits.
pub fn eb_n0_db(power: f64, n0: f64, c: &DutyCycledConstellation) -> Result<f64> {
    if !(n0 > 0.0) {
        return Err(Error::param(format!(
            "noise level N0 = {n0} must be positive"
        )));
    }
    let h = entropy_bits(c);
    if !(h > 0.0) {
        return Err(Error::param("constellation entropy is zero"));
    }
    Ok(10.0 * (power / (n0 * h)).log10())
}

/// Inverse of [`eb_n0_db`]: the linear `P / N0` giving the requested SNR per bit.
pub fn snr_from_eb_n0_db(ebn0_db: f64, c: &DutyCycledConstellation) -> Result<f64> {
    let h = entropy_bits(c);
    if !(h > 0.0) {
        return Err(Error::param("constellation entropy is zero"));
    }
    Ok(10f64.powf(ebn0_db / 10.0) * h)
}

/// Draws a symbol index according to the priors and returns it with its amplitude.
pub fn sample_symbol<R: Rng + ?Sized>(
    c: &DutyCycledConstellation,
    rng: &mut R,
) -> (usize, Complex64) {
    let u: f64 = rng.random();
    let zero_prior = c.points[0].prior;
    let index = if u < zero_prior {
        0
    } else {
        let k = ((u - zero_prior) / (c.nu / c.xi() as f64)) as usize;
        1 + k.min(c.xi() - 1)
    };
    (index, c.points[index].amplitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_invariants(c: &DutyCycledConstellation) {
        let total: f64 = c.points().iter().map(|p| p.prior).sum();
        assert!((total - 1.0).abs() <= 1e-15);
        assert_eq!(c.points()[0].prior, 1.0 - c.nu());
        let power: f64 = c
            .points()
            .iter()
            .map(|p| p.prior * p.amplitude.norm_sqr())
            .sum();
        assert!((power - c.power()).abs() <= 1e-12 * c.power());
        for p in &c.points()[1..] {
            assert_eq!(p.prior, c.nu() / c.xi() as f64);
            assert!(
                (p.amplitude.norm_sqr() - c.power() / c.nu()).abs() <= 1e-12 * c.power() / c.nu()
            );
        }
    }

    #[test]
    fn invariants_on_nu_grid() {
        for scheme in [Scheme::Oobpsk, Scheme::Ooqpsk] {
            for i in 1..=100 {
                let nu = i as f64 / 100.0;
                for power in [0.01, 1.0, 37.5] {
                    check_invariants(&build_constellation(scheme, nu, power).unwrap());
                }
            }
        }
    }

    #[test]
    fn bpsk_baseline() {
        let c = build_constellation(Scheme::Oobpsk, 1.0, 1.0).unwrap();
        assert_eq!(c.points()[0].prior, 0.0);
        assert_eq!(c.points()[1].amplitude, Complex64::new(1.0, 0.0));
        assert_eq!(c.points()[2].amplitude, Complex64::new(-1.0, 0.0));
        assert_eq!(c.points()[1].prior, 0.5);
        assert_eq!(c.log_prior_ratio(), f64::NEG_INFINITY);
    }

    #[test]
    fn ooqpsk_half_duty() {
        let c = build_constellation(Scheme::Ooqpsk, 0.5, 1.0).unwrap();
        assert_eq!(c.points()[0].prior, 0.5);
        let expected = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)];
        for (p, (re, im)) in c.points()[1..].iter().zip(expected) {
            assert!((p.amplitude - Complex64::new(re, im)).norm() < 1e-15);
            assert_eq!(p.prior, 0.125);
            assert!((p.amplitude.norm_sqr() - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn oobpsk_par() {
        let c = build_constellation(Scheme::Oobpsk, 0.1, 1.0).unwrap();
        assert!((c.points()[1].amplitude.re - 3.16227766016838).abs() < 1e-12);
        assert!((c.peak_to_average_ratio() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_constellation(Scheme::Oobpsk, 0.0, 1.0).is_err());
        assert!(build_constellation(Scheme::Oobpsk, 1.5, 1.0).is_err());
        assert!(build_constellation(Scheme::Ooqpsk, f64::NAN, 1.0).is_err());
        assert!(build_constellation(Scheme::Ooqpsk, 0.5, 0.0).is_err());
        assert!(build_constellation(Scheme::Ooqpsk, 0.5, -1.0).is_err());
    }

    #[test]
    fn entropy_examples() {
        let h = |s, nu| entropy_bits(&build_constellation(s, nu, 1.0).unwrap());
        assert!((h(Scheme::Oobpsk, 1.0) - 1.0).abs() < 1e-15);
        assert!((h(Scheme::Ooqpsk, 1.0) - 2.0).abs() < 1e-15);
        // Oracle: direct -sum p log2 p over {0.9, 0.025 x 4}.
        let oracle = -(0.9f64 * 0.9f64.log2() + 4.0 * 0.025 * 0.025f64.log2());
        assert!((oracle - 0.66900).abs() < 1e-5);
        assert!((h(Scheme::Ooqpsk, 0.1) - oracle).abs() < 1e-14);
        // Uniform three-point OOBPSK at nu = 2/3.
        assert!((h(Scheme::Oobpsk, 2.0 / 3.0) - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn entropy_bounded_by_log_alphabet() {
        for scheme in [Scheme::Oobpsk, Scheme::Ooqpsk] {
            let bound = ((scheme.xi() + 1) as f64).log2();
            for i in 1..=200 {
                let nu = i as f64 / 200.0;
                let h = entropy_bits(&build_constellation(scheme, nu, 1.0).unwrap());
                assert!(h > 0.0 && h <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn eb_n0_examples() {
        let bpsk = build_constellation(Scheme::Oobpsk, 1.0, 1.0).unwrap();
        let qpsk = build_constellation(Scheme::Ooqpsk, 1.0, 1.0).unwrap();
        let peaky = build_constellation(Scheme::Ooqpsk, 0.1, 1.0).unwrap();
        assert!(eb_n0_db(1.0, 1.0, &bpsk).unwrap().abs() < 1e-12);
        assert!(eb_n0_db(2.0, 1.0, &qpsk).unwrap().abs() < 1e-12);
        let oracle = 10.0 * (1.0 / 0.6689955935892812f64).log10();
        assert!((eb_n0_db(1.0, 1.0, &peaky).unwrap() - oracle).abs() < 1e-12);
        assert!((oracle - 1.746).abs() < 1e-3);
        assert!(eb_n0_db(1.0, 0.0, &peaky).is_err());
    }

    #[test]
    fn sampling_frequencies() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bpsk = build_constellation(Scheme::Oobpsk, 1.0, 1.0).unwrap();
        assert!((0..100_000).all(|_| sample_symbol(&bpsk, &mut rng).0 != 0));

        let n = 1_000_000;
        let c = build_constellation(Scheme::Ooqpsk, 0.2, 2.5).unwrap();
        let mut zeros = 0u64;
        let mut power = 0.0;
        let mut counts = [0u64; 5];
        for _ in 0..n {
            let (k, x) = sample_symbol(&c, &mut rng);
            assert_eq!(x, c.points()[k].amplitude);
            counts[k] += 1;
            zeros += (k == 0) as u64;
            power += x.norm_sqr();
        }
        let sigma = (0.8f64 * 0.2 / n as f64).sqrt();
        assert!((zeros as f64 / n as f64 - 0.8).abs() < 4.0 * sigma);
        assert!((power / n as f64 - 2.5).abs() < 0.01 * 2.5);
        assert!(counts[1..].iter().all(|&k| k > 45_000));
    }
}
