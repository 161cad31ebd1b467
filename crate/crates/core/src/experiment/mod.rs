//! Orchestration behind the command-line front end: worker pool, run
//! manifests, CSV tables and the Monte Carlo driver.
//!
//! Work items are indexed; item `i` draws from its own stream derived from
//! `(master_seed, i)`, and results are collected in index order. Output is
//! therefore independent of the worker count.

pub mod cli;
pub mod manifest;
pub mod montecarlo;
pub mod table;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub use manifest::RunManifest;
pub use montecarlo::{ColumnSummary, ErrorColumn, EstimatorChoice, MonteCarloConfig, MonteCarloRun};

/// Overrides the worker count.
pub const THREADS_ENV: &str = "OSCILLVOL_THREADS";

/// Worker count from [`THREADS_ENV`], else the machine parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::invalid(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Evaluates `f(0..count)` on `threads` workers, in index order.
pub fn par_map<T, F>(count: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..count as u64).into_par_iter().map(&f).collect())
}
