//! Flat fading channel `y = h x + n`.
//!
//! Fading coefficients are i.i.d. per symbol. The Rician mean is carried by its
//! magnitude only; any phase of `m` can be rotated out of the received signal.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Rician fading: `h ~ CN(m, gamma^2)` with real `m = |m| >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rician {
    mean_magnitude: f64,
    variance: f64,
}

impl Rician {
    pub fn new(mean_magnitude: f64, variance: f64) -> Result<Self> {
        if !(mean_magnitude >= 0.0 && mean_magnitude.is_finite()) {
            return Err(Error::param(format!(
                "Rician |m| = {mean_magnitude} must be finite and >= 0"
            )));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::param(format!(
                "Rician variance = {variance} must be positive"
            )));
        }
        Ok(Rician {
            mean_magnitude,
            variance,
        })
    }

    /// Rician channel with factor `K = |m|^2 / gamma^2` and `E|h|^2 = mean_square`.
    pub fn from_k_factor(k: f64, mean_square: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::param(format!(
                "Rician factor K = {k} must be finite and >= 0"
            )));
        }
        if !(mean_square > 0.0 && mean_square.is_finite()) {
            return Err(Error::param(format!(
                "mean square {mean_square} must be positive"
            )));
        }
        let variance = mean_square / (k + 1.0);
        Rician::new((k * variance).sqrt(), variance)
    }

    pub fn mean_magnitude(&self) -> f64 {
        self.mean_magnitude
    }

    /// Diffuse variance `gamma^2 = E|h - m|^2`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn k_factor(&self) -> f64 {
        self.mean_magnitude * self.mean_magnitude / self.variance
    }

    pub fn mean_square(&self) -> f64 {
        self.mean_magnitude * self.mean_magnitude + self.variance
    }
}

/// Fading law of the channel coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingSpec {
    Rayleigh { mean_square: f64 },
    Rician(Rician),
}

impl FadingSpec {
    pub fn rayleigh(mean_square: f64) -> Result<Self> {
        if !(mean_square > 0.0 && mean_square.is_finite()) {
            return Err(Error::param(format!(
                "Rayleigh mean square {mean_square} must be positive"
            )));
        }
        Ok(FadingSpec::Rayleigh { mean_square })
    }

    pub fn rician(mean_magnitude: f64, variance: f64) -> Result<Self> {
        Rician::new(mean_magnitude, variance).map(FadingSpec::Rician)
    }

    /// Rayleigh fading is Rician with zero mean.
    pub fn as_rician(&self) -> Rician {
        match *self {
            FadingSpec::Rayleigh { mean_square } => Rician {
                mean_magnitude: 0.0,
                variance: mean_square,
            },
            FadingSpec::Rician(r) => r,
        }
    }

    pub fn mean_square(&self) -> f64 {
        self.as_rician().mean_square()
    }
}

/// Parses `rayleigh:<ms>`, `rician:k=<K>[:ms=<ms>]` or `rician:m=<|m|>:var=<gamma^2>`.
///
/// Without `ms`, the K form is normalised to `E|h|^2 = 1`.
impl FromStr for FadingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let number = |v: &str| -> Result<f64> {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::param(format!("bad number '{v}' in channel '{s}'")))
        };
        match kind.to_ascii_lowercase().as_str() {
            "rayleigh" => {
                let ms = if rest.is_empty() {
                    1.0
                } else {
                    number(rest.trim_start_matches("ms="))?
                };
                FadingSpec::rayleigh(ms)
            }
            "rician" => {
                let (mut k, mut ms, mut m, mut var) = (None, None, None, None);
                for field in rest.split(':').filter(|f| !f.is_empty()) {
                    let (key, value) = field.split_once('=').ok_or_else(|| {
                        Error::param(format!("expected key=value in channel '{s}'"))
                    })?;
                    let slot = match key.trim() {
                        "k" | "K" => &mut k,
                        "ms" => &mut ms,
                        "m" => &mut m,
                        "var" => &mut var,
                        other => {
                            return Err(Error::param(format!(
                                "unknown channel key '{other}' in '{s}'"
                            )))
                        }
                    };
                    *slot = Some(number(value)?);
                }
                match (k, ms, m, var) {
                    (Some(k), ms, None, None) => {
                        Rician::from_k_factor(k, ms.unwrap_or(1.0)).map(FadingSpec::Rician)
                    }
                    (None, None, Some(m), Some(var)) => FadingSpec::rician(m, var),
                    _ => Err(Error::param(format!(
                        "rician channel needs k=<K>[:ms=<E|h|^2>] or m=<|m|>:var=<variance>, got '{s}'"
                    ))),
                }
            }
            _ => Err(Error::param(format!(
                "unknown channel '{s}' (expected rayleigh or rician)"
            ))),
        }
    }
}

impl fmt::Display for FadingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingSpec::Rayleigh { mean_square } => write!(f, "rayleigh:{mean_square}"),
            FadingSpec::Rician(r) => write!(f, "rician:m={}:var={}", r.mean_magnitude, r.variance),
        }
    }
}

/// One channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySample {
    pub y: Complex64,
    pub h: Complex64,
    pub x_index: usize,
    pub n0: f64,
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R, std_per_dim: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_dim, im * std_per_dim)
}

/// Draws a fading coefficient: real part `N(|m|, gamma^2/2)`, imaginary part `N(0, gamma^2/2)`.
pub fn sample_fading<R: Rng + ?Sized>(spec: &FadingSpec, rng: &mut R) -> Complex64 {
    let r = spec.as_rician();
    complex_normal(rng, (0.5 * r.variance).sqrt()) + r.mean_magnitude
}

/// `y = h x + n` with circularly symmetric noise of total variance `n0`.
pub fn transmit<R: Rng + ?Sized>(x: Complex64, h: Complex64, n0: f64, rng: &mut R) -> Complex64 {
    h * x + complex_normal(rng, (0.5 * n0).sqrt())
}

/// Output density of the noncoherent channel,
/// `exp(-|y - m x|^2 / (gamma^2 |x|^2 + N0)) / (pi (gamma^2 |x|^2 + N0))`.
pub fn conditional_density_noncoherent(y: Complex64, x: Complex64, spec: &Rician, n0: f64) -> f64 {
    let s = spec.variance * x.norm_sqr() + n0;
    (-(y - x * spec.mean_magnitude).norm_sqr() / s).exp() / (PI * s)
}

/// Natural log of [`conditional_density_noncoherent`], safe far in the tails.
pub fn log_conditional_density_noncoherent(
    y: Complex64,
    x: Complex64,
    spec: &Rician,
    n0: f64,
) -> f64 {
    let s = spec.variance * x.norm_sqr() + n0;
    -(y - x * spec.mean_magnitude).norm_sqr() / s - (PI * s).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, q, QuadratureSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_fading() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = FadingSpec::rician(3.0, 1e-30).unwrap();
        let h = sample_fading(&spec, &mut rng);
        assert!((h - Complex64::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn fading_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let ray = FadingSpec::rayleigh(1.0).unwrap();
        let e: f64 = (0..n)
            .map(|_| sample_fading(&ray, &mut rng).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((e - 1.0).abs() < 0.01);

        let ric = FadingSpec::rician(5f64.sqrt(), 1.0).unwrap();
        let mut mean = Complex64::new(0.0, 0.0);
        let mut power = 0.0;
        for _ in 0..n {
            let h = sample_fading(&ric, &mut rng);
            mean += h;
            power += h.norm_sqr();
        }
        mean /= n as f64;
        power /= n as f64;
        let sigma = (0.5f64 / n as f64).sqrt();
        assert!((mean.re - 2.23607).abs() < 4.0 * sigma + 1e-5);
        assert!(mean.im.abs() < 4.0 * sigma);
        assert!((power - 6.0).abs() < 0.06);
    }

    #[test]
    fn fading_chi_square() {
        // 10 x 10 cells on the standardised (re, im) plane; chi2(99) at 1e-3 is 148.23.
        let edges = [
            f64::NEG_INFINITY,
            -1.6,
            -1.0,
            -0.6,
            -0.25,
            0.0,
            0.25,
            0.6,
            1.0,
            1.6,
            f64::INFINITY,
        ];
        let cell_p: Vec<f64> = edges.windows(2).map(|w| q(w[0]) - q(w[1])).collect();
        let bin = |z: f64| {
            edges
                .windows(2)
                .position(|w| z >= w[0] && z < w[1])
                .unwrap()
        };
        let settings = [
            FadingSpec::rayleigh(1.0).unwrap(),
            FadingSpec::rician(2.0, 0.5).unwrap(),
            FadingSpec::Rician(Rician::from_k_factor(5.0, 1.0).unwrap()),
        ];
        for (i, spec) in settings.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + i as u64);
            let r = spec.as_rician();
            let sd = (0.5 * r.variance()).sqrt();
            let n = 100_000;
            let mut counts = [[0u64; 10]; 10];
            for _ in 0..n {
                let h = sample_fading(spec, &mut rng);
                counts[bin((h.re - r.mean_magnitude()) / sd)][bin(h.im / sd)] += 1;
            }
            let mut chi2 = 0.0;
            for a in 0..10 {
                for b in 0..10 {
                    let e = n as f64 * cell_p[a] * cell_p[b];
                    chi2 += (counts[a][b] as f64 - e).powi(2) / e;
                }
            }
            assert!(chi2 < 148.23, "setting {i}: chi2 = {chi2}");
        }
    }

    #[test]
    fn transmit_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = transmit(
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 0.0),
            1e-30,
            &mut rng,
        );
        assert!((y - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let y = transmit(
            Complex64::new(1.0, -1.0),
            Complex64::new(1.0, 1.0),
            1e-30,
            &mut rng,
        );
        assert!((y - Complex64::new(2.0, 0.0)).norm() < 1e-12);

        let n = 1_000_000;
        let n0 = 0.7;
        let zero = Complex64::new(0.0, 0.0);
        let e: f64 = (0..n)
            .map(|_| transmit(zero, zero, n0, &mut rng).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((e - n0).abs() < 0.01 * n0);
    }

    #[test]
    fn output_power_identity() {
        use crate::modem::{build_constellation, sample_symbol, Scheme};
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = build_constellation(Scheme::Ooqpsk, 0.3, 2.0).unwrap();
        let spec = FadingSpec::rician(0.8, 0.36).unwrap();
        let n0 = 0.5;
        let n = 1_000_000;
        let mut e = 0.0;
        for _ in 0..n {
            let (_, x) = sample_symbol(&c, &mut rng);
            let h = sample_fading(&spec, &mut rng);
            e += transmit(x, h, n0, &mut rng).norm_sqr();
        }
        let want = spec.mean_square() * 2.0 + n0;
        assert!((e / n as f64 - want).abs() < 0.01 * want);
    }

    #[test]
    fn density_examples() {
        let spec = Rician::new(1.2, 0.4).unwrap();
        let n0 = 0.3;
        let zero = Complex64::new(0.0, 0.0);
        assert!(
            (conditional_density_noncoherent(zero, zero, &spec, n0) - 1.0 / (PI * n0)).abs()
                < 1e-14
        );
        let x = Complex64::new(0.7, -0.2);
        let peak = conditional_density_noncoherent(x * 1.2, x, &spec, n0);
        assert!((peak - 1.0 / (PI * (0.4 * x.norm_sqr() + n0))).abs() < 1e-14);
        let y = Complex64::new(0.3, 0.9);
        let log = log_conditional_density_noncoherent(y, x, &spec, n0);
        assert!((log.exp() - conditional_density_noncoherent(y, x, &spec, n0)).abs() < 1e-14);
    }

    #[test]
    fn noise_density_normalised() {
        let spec = Rician::new(1.0, 1.0).unwrap();
        let n0 = 0.5;
        let quad = QuadratureSpec::with_rel_tol(1e-9).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        let l = 12.0;
        let total = integrate(
            |re| {
                integrate(
                    |im| conditional_density_noncoherent(Complex64::new(re, im), zero, &spec, n0),
                    -l,
                    l,
                    &quad.inner(),
                )
                .unwrap()
            },
            -l,
            l,
            &quad,
        )
        .unwrap();
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn parse_channels() {
        assert_eq!(
            "rayleigh:1".parse::<FadingSpec>().unwrap(),
            FadingSpec::rayleigh(1.0).unwrap()
        );
        assert_eq!(
            "rayleigh".parse::<FadingSpec>().unwrap(),
            FadingSpec::rayleigh(1.0).unwrap()
        );
        let r = "rician:k=5".parse::<FadingSpec>().unwrap().as_rician();
        assert!((r.k_factor() - 5.0).abs() < 1e-12);
        assert!((r.mean_square() - 1.0).abs() < 1e-12);
        let r = "rician:k=5:ms=6".parse::<FadingSpec>().unwrap().as_rician();
        assert!((r.variance() - 1.0).abs() < 1e-12);
        let r = "rician:m=2:var=0.5"
            .parse::<FadingSpec>()
            .unwrap()
            .as_rician();
        assert_eq!((r.mean_magnitude(), r.variance()), (2.0, 0.5));
        for bad in [
            "rician",
            "rician:k=-1",
            "rician:m=1",
            "nakagami:2",
            "rayleigh:0",
            "rician:k=5:q=1",
        ] {
            assert!(bad.parse::<FadingSpec>().is_err(), "{bad}");
        }
        let spec = FadingSpec::rician(2.0, 0.5).unwrap();
        assert_eq!(spec.to_string().parse::<FadingSpec>().unwrap(), spec);
    }
}
