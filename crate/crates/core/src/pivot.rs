//! Monte Carlo law of the pivot
//! `𝔻 = B(1) / ( (n−1)⁻¹ Σ_{i<n} η_i² (B(η_i) − η_i B(1))² )^{1/2}`, `η_i = i/n`,
//! for a standard Brownian motion `B`.
//!
//! Path `j` draws from ChaCha8 keyed by the sample seed with stream `j`, so
//! any partition of paths across workers reproduces the same draws.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Smallest admissible Monte Carlo sample.
pub const MIN_PATHS: usize = 1000;

/// Draws of `𝔻` with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotSample {
    draws: Vec<f64>,
    sorted: Vec<f64>,
    pub nu_n: usize,
    pub n_steps: usize,
    pub seed: u64,
}

pub fn validate(nu_n: usize, n_paths: usize, n_steps: usize) -> Result<()> {
    if nu_n < 3 {
        return Err(Error::Pivot(alloc::format!("nu_n = {nu_n} must be at least 3")));
    }
    if n_steps == 0 || n_steps % nu_n != 0 {
        return Err(Error::Pivot(alloc::format!("n_steps = {n_steps} must be a positive multiple of nu_n = {nu_n}")));
    }
    if n_paths < MIN_PATHS {
        return Err(Error::Pivot(alloc::format!("n_paths = {n_paths} below the minimum {MIN_PATHS}")));
    }
    Ok(())
}

/// One draw of `𝔻` for path index `path`.
pub fn pivot_draw(nu_n: usize, n_steps: usize, seed: u64, path: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    let per_node = n_steps / nu_n;
    let sd = libm::sqrt(1.0 / n_steps as f64);
    let mut nodes = alloc::vec![0.0; nu_n];
    loop {
        let mut b = 0.0;
        for node in nodes.iter_mut() {
            let mut s = 0.0;
            for _ in 0..per_node {
                let z: f64 = StandardNormal.sample(&mut rng);
                s += z;
            }
            b += sd * s;
            *node = b;
        }
        let b1 = nodes[nu_n - 1];
        let mut acc = 0.0;
        for (i, &bi) in nodes[..nu_n - 1].iter().enumerate() {
            let eta = (i + 1) as f64 / nu_n as f64;
            let r = bi - eta * b1;
            acc += eta * eta * r * r;
        }
        let denom = libm::sqrt(acc / (nu_n - 1) as f64);
        if denom > 0.0 && denom.is_finite() {
            return b1 / denom;
        }
    }
}

/// Serial simulation of `n_paths` draws.
pub fn simulate_pivot(nu_n: usize, n_paths: usize, n_steps: usize, seed: u64) -> Result<PivotSample> {
    validate(nu_n, n_paths, n_steps)?;
    let draws = (0..n_paths as u64).map(|j| pivot_draw(nu_n, n_steps, seed, j)).collect();
    PivotSample::from_draws(draws, nu_n, n_steps, seed)
}

impl PivotSample {
    pub fn from_draws(draws: Vec<f64>, nu_n: usize, n_steps: usize, seed: u64) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::Pivot("empty pivot sample".into()));
        }
        if draws.iter().any(|v| !v.is_finite()) {
            return Err(Error::Pivot("pivot sample contains non-finite draws".into()));
        }
        let mut sorted = draws.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        Ok(PivotSample { draws, sorted, nu_n, n_steps, seed })
    }

    pub fn n_paths(&self) -> usize {
        self.draws.len()
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Lower inverse empirical CDF: the `⌈pN⌉`-th smallest draw.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        quantile_sorted(&self.sorted, p)
    }

    /// Fraction of draws `≥ d`.
    pub fn p_value(&self, d: f64) -> f64 {
        if d.is_nan() {
            return 1.0;
        }
        let below = self.sorted.partition_point(|&x| x < d);
        (self.sorted.len() - below) as f64 / self.sorted.len() as f64
    }

    pub fn median(&self) -> f64 {
        quantile_sorted(&self.sorted, 0.5).unwrap_or(0.0)
    }
}

/// Order-statistic quantile of an ascending sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(alloc::format!("quantile level {p} outside (0, 1)")));
    }
    if sorted.is_empty() {
        return Err(Error::Pivot("empty pivot sample".into()));
    }
    let n = sorted.len();
    let rank = libm::ceil(p * n as f64 - 1e-9).max(1.0) as usize;
    Ok(sorted[rank.min(n) - 1])
}
