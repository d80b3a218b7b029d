//! Thread-pool drivers. Work items carry their own derived seeds and results
//! are collected in index order, so output does not depend on the number of
//! workers.

use rayon::prelude::*;
use specrel_core::pivot::{self, pivot_draw, PivotSample};
use specrel_core::relevance::{EstimationConfig, HypothesisSpec, TestResult};
use specrel_core::simlab::{replication_seeds, run_replication, Model};

use crate::error::{CliError, CliResult};

/// Builds a pool with at most `threads` workers (`0` = rayon's default).
pub fn pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config("thread pool", e.to_string()))
}

/// Parallel counterpart of the serial pivot simulation; identical draws.
pub fn simulate_pivot(pool: &rayon::ThreadPool, nu_n: usize, n_paths: usize, n_steps: usize, seed: u64) -> CliResult<PivotSample> {
    pivot::validate(nu_n, n_paths, n_steps).map_err(|e| CliError::from_core("simulate pivot", e))?;
    let draws: Vec<f64> = pool.install(|| {
        (0..n_paths as u64).into_par_iter().map(|j| pivot_draw(nu_n, n_steps, seed, j)).collect()
    });
    PivotSample::from_draws(draws, nu_n, n_steps, seed).map_err(|e| CliError::from_core("simulate pivot", e))
}

/// Runs `reps` replications of one grid point; outcome `r` belongs to
/// replication `r`.
#[allow(clippy::too_many_arguments)]
pub fn replications(
    pool: &rayon::ThreadPool,
    models: &(Model, Model),
    t_len: usize,
    hypotheses: &[HypothesisSpec],
    pivot: &PivotSample,
    config: &EstimationConfig,
    master: u64,
    point: u64,
    reps: usize,
) -> Vec<specrel_core::Result<Vec<TestResult>>> {
    pool.install(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(|r| run_replication(models, t_len, hypotheses, pivot, config, replication_seeds(master, point, r)))
            .collect()
    })
}
