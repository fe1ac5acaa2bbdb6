//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use peaky::channel::{FadingSpec, Rician};
use peaky::modem::{build_constellation, DutyCycledConstellation, Scheme};
use peaky::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Index of the largest score; the smallest index wins ties.
fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, s) in scores.enumerate() {
        if s > best.1 {
            best = (k, s);
        }
    }
    best.0
}

/// Posterior argmax with the fading realisation known: `ln p_k - |y - h x_k|^2 / N0`.
pub fn map_coherent(c: &DutyCycledConstellation, y: Complex64, h: Complex64, n0: f64) -> usize {
    argmax(
        c.points()
            .iter()
            .map(|p| p.prior.ln() - (y - h * p.amplitude).norm_sqr() / n0),
    )
}

/// Posterior argmax when `y | x ~ CN(m x, gamma^2 |x|^2 + N0)`.
pub fn map_noncoherent(c: &DutyCycledConstellation, y: Complex64, spec: &Rician, n0: f64) -> usize {
    argmax(c.points().iter().map(|p| {
        let s = spec.variance() * p.amplitude.norm_sqr() + n0;
        p.prior.ln() - s.ln() - (y - spec.mean_magnitude() * p.amplitude).norm_sqr() / s
    }))
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng, std_per_dim: f64) -> Complex64 {
    // Box-Muller keeps this independent of the library's sampler.
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt() * std_per_dim;
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    Complex64::new(r * c, r * s)
}

/// A random detection problem: parameters plus an observation near the constellation.
pub struct Case {
    pub c: DutyCycledConstellation,
    pub n0: f64,
    pub h: Complex64,
    pub rician: Rician,
    pub y: Complex64,
}

pub fn random_case(rng: &mut ChaCha8Rng, scheme: Scheme, noncoherent: bool) -> Case {
    let nu = if rng.random_bool(0.05) {
        1.0
    } else {
        rng.random_range(0.01..1.0)
    };
    let power = 10f64.powf(rng.random_range(-1.0..1.0));
    let n0 = 10f64.powf(rng.random_range(-3.0..1.5));
    let c = build_constellation(scheme, nu, power).unwrap();
    let k = rng.random_range(0.0..20.0);
    let rician = Rician::from_k_factor(k, 10f64.powf(rng.random_range(-0.5..0.5))).unwrap();
    let h = if noncoherent {
        rician.mean_magnitude() + complex_gaussian(rng, (0.5 * rician.variance()).sqrt())
    } else {
        Complex64::from_polar(
            10f64.powf(rng.random_range(-1.5..1.0)),
            rng.random_range(-3.2..3.2),
        )
    };
    let x = c.points()[rng.random_range(0..c.len())].amplitude;
    let y = if rng.random_bool(0.1) {
        // Arbitrary points far from any symbol.
        complex_gaussian(rng, 3.0 * c.peak_amplitude())
    } else {
        h * x + complex_gaussian(rng, (0.5 * n0).sqrt())
    };
    Case {
        c,
        n0,
        h,
        rician,
        y,
    }
}

pub fn rayleigh() -> FadingSpec {
    FadingSpec::rayleigh(1.0).unwrap()
}

pub fn rician_k5() -> FadingSpec {
    "rician:k=5".parse().unwrap()
}
