//! Monte Carlo symbol error rate through the actual sampler and detector.
//!
//! Trials are split into fixed-size blocks. Block `b` draws from ChaCha8
//! stream `b` seeded by the configuration seed, so the error count depends on
//! `(seed, cfg)` only: the number of workers just decides who runs which block.

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ErrorEstimate, Method};
use crate::channel::{sample_fading, transmit, FadingSpec};
use crate::detect::{CoherentDetector, NoncoherentDetector};
use crate::modem::{build_constellation, sample_symbol, DutyCycledConstellation, Scheme};
use crate::{Error, Result};

/// Trials per random substream.
pub const BLOCK_TRIALS: u64 = 1 << 16;

/// Default z-score of reported intervals (3 sigma).
pub const DEFAULT_Z: f64 = 3.0;

/// Receiver channel knowledge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reception {
    /// Fading realisation known at the receiver.
    Coherent,
    /// Only the fading statistics are known.
    Noncoherent,
}

impl std::fmt::Display for Reception {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Reception::Coherent => "coherent",
            Reception::Noncoherent => "noncoherent",
        })
    }
}

impl FromStr for Reception {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coherent" => Ok(Reception::Coherent),
            "noncoherent" => Ok(Reception::Noncoherent),
            _ => Err(Error::param(format!(
                "unknown reception '{s}' (expected coherent or noncoherent)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub nu: f64,
    pub power: f64,
    pub channel: FadingSpec,
    pub n0: f64,
    pub reception: Reception,
    pub trials: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    fn validate(&self) -> Result<DutyCycledConstellation> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::param("workers must be at least 1"));
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(Error::param(format!(
                "N0 = {} must be positive and finite",
                self.n0
            )));
        }
        build_constellation(self.scheme, self.nu, self.power)
    }
}

enum Receiver {
    Coherent(CoherentDetector),
    Noncoherent(NoncoherentDetector),
}

fn run_block(c: &DutyCycledConstellation, cfg: &SimConfig, rx: &Receiver, block: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(block);
    let start = block * BLOCK_TRIALS;
    let count = BLOCK_TRIALS.min(cfg.trials - start);
    let mut errors = 0;
    for _ in 0..count {
        let (k, x) = sample_symbol(c, &mut rng);
        let h = sample_fading(&cfg.channel, &mut rng);
        let y = transmit(x, h, cfg.n0, &mut rng);
        let detected = match rx {
            Receiver::Coherent(d) => d.detect(y, h),
            Receiver::Noncoherent(d) => d.detect(y),
        };
        errors += (detected != k) as u64;
    }
    errors
}

/// Counts symbol errors over `cfg.trials` independent channel uses.
pub fn count_errors(cfg: &SimConfig) -> Result<u64> {
    let c = cfg.validate()?;
    let rx = match cfg.reception {
        Reception::Coherent => Receiver::Coherent(CoherentDetector::new(&c, cfg.n0)?),
        Reception::Noncoherent => Receiver::Noncoherent(NoncoherentDetector::new(
            &c,
            &cfg.channel.as_rician(),
            cfg.n0,
        )?),
    };
    let blocks = cfg.trials.div_ceil(BLOCK_TRIALS);
    if cfg.workers == 1 || blocks == 1 {
        return Ok((0..blocks).map(|b| run_block(&c, cfg, &rx, b)).sum());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::param(format!("cannot start {} workers: {e}", cfg.workers)))?;
    Ok(pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(&c, cfg, &rx, b))
            .sum()
    }))
}

/// Simulated symbol error rate with a 3-sigma Wilson interval.
pub fn simulate(cfg: &SimConfig) -> Result<ErrorEstimate> {
    let errors = count_errors(cfg)?;
    let (ci_low, ci_high) = wilson_interval(errors, cfg.trials, DEFAULT_Z)?;
    Ok(ErrorEstimate {
        value: errors as f64 / cfg.trials as f64,
        method: Method::MonteCarlo,
        ci_low,
        ci_high,
        trials: cfg.trials,
    })
}

/// Wilson score interval for `errors` successes in `trials`, clipped to `[0, 1]`.
pub fn wilson_interval(errors: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 || errors > trials {
        return Err(Error::param(format!(
            "need 0 <= errors ({errors}) <= trials ({trials}), trials >= 1"
        )));
    }
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::param(format!("z = {z} must be positive")));
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if errors == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if errors == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((low, high))
}
