//! Zero-drift geometric Brownian motion for the equilibrium exchange rate,
//! sampled exactly on a uniform grid.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `dQ/Q = σ dB` on `[0, horizon]` with `steps` uniform increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbmSpec {
    pub q0: f64,
    pub sigma: f64,
    pub horizon: f64,
    pub steps: usize,
}

impl Default for GbmSpec {
    fn default() -> Self {
        Self {
            q0: 1.0,
            sigma: 0.2,
            horizon: 1.0,
            steps: 1000,
        }
    }
}

impl GbmSpec {
    pub fn new(q0: f64, sigma: f64, horizon: f64, steps: usize) -> Result<Self> {
        let spec = Self {
            q0,
            sigma,
            horizon,
            steps,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q0.is_finite() && self.q0 > 0.0) {
            return Err(Error::invalid("q0", format!("must be positive, got {}", self.q0)));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::invalid(
                "sigma",
                format!("must be non-negative, got {}", self.sigma),
            ));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::invalid(
                "horizon",
                format!("must be positive, got {}", self.horizon),
            ));
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn with_steps(&self, steps: usize) -> Self {
        Self { steps, ..*self }
    }
}

/// Sampled path: `times[i] = i·T/N`, `prices[i] = Q_{t_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    pub times: Vec<f64>,
    pub prices: Vec<f64>,
}

impl PricePath {
    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn steps(&self) -> usize {
        self.prices.len() - 1
    }

    pub fn terminal(&self) -> f64 {
        self.prices[self.prices.len() - 1]
    }

    /// Writes the path as CSV with header `t,Q`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,Q")?;
        for (t, q) in self.times.iter().zip(&self.prices) {
            writeln!(out, "{t},{q}")?;
        }
        Ok(())
    }
}

/// Mixes a master seed and a path index into an independent per-path seed
/// (SplitMix64 finaliser over both words).
pub fn path_seed(master_seed: u64, path_index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(master_seed.wrapping_add(0x9e37_79b9_7f4a_7c15)) ^ path_index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Exact lognormal stepping: `Q_{i+1} = Q_i·exp(σ√Δt·Z_i − σ²Δt/2)`.
pub fn sample_path(spec: &GbmSpec, seed: u64) -> Result<PricePath> {
    spec.validate()?;
    let n = spec.steps;
    let dt = spec.dt();
    let vol = spec.sigma * dt.sqrt();
    let drift = -0.5 * spec.sigma * spec.sigma * dt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let times = (0..=n).map(|i| i as f64 * dt).collect();
    let mut prices = Vec::with_capacity(n + 1);
    prices.push(spec.q0);
    let mut log_q = spec.q0.ln();
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(&mut rng);
        if vol == 0.0 {
            prices.push(spec.q0);
            continue;
        }
        log_q += vol * z + drift;
        prices.push(log_q.exp());
    }
    Ok(PricePath { times, prices })
}
