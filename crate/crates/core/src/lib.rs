//! Simulation and estimation for the oscillating Brownian motion (OBM).
//!
//! The OBM solves `dY = σ(Y) dW` with `σ(y) = σ₊` on `y ≥ 0` and `σ₋` on
//! `y < 0`. This crate provides exact path simulation (through the skew
//! Brownian motion), the occupation-weighted volatility estimators, the
//! local-time estimator, samplers for the limit laws of the normalized
//! errors, the oscillating random walk, and the Monte Carlo tooling used by
//! the `oscillvol` command-line front end.

pub mod error;
pub mod estimators;
pub mod experiment;
pub mod limit_laws;
pub mod orw;
pub mod process;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use estimators::{EstimateReport, Estimate, Side};
pub use limit_laws::LimitSample;
pub use orw::{OrwParams, OrwPath};
pub use process::{DriftSpec, ObmParams, PathGrid, PathKind};
pub use rng::RngStream;
pub use stats::DensityCurve;
