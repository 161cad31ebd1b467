//! Oscillating random walk: ±1 moves with probability `q` above 0, `p`
//! below 0, and a forced fair move at 0. After diffusive rescaling it
//! approximates the OBM with `σ₊² = q`, `σ₋² = p`.

use crate::error::{Error, Result};
use crate::process::{PathGrid, PathKind};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrwParams {
    p: f64,
    q: f64,
}

impl OrwParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrwPath {
    states: Vec<i64>,
}

impl OrwPath {
    /// Validates the walk invariants: starts at 0, unit moves, and every
    /// visit to 0 is followed by a move.
    pub fn new(states: Vec<i64>) -> Result<Self> {
        if states.len() < 2 {
            return Err(Error::InsufficientData("walk needs at least 2 states".into()));
        }
        if states[0] != 0 {
            return Err(Error::invalid("walk must start at 0"));
        }
        for (k, w) in states.windows(2).enumerate() {
            let d = (w[1] - w[0]).abs();
            if d > 1 || (w[0] == 0 && d == 0) {
                return Err(Error::invalid(format!("illegal move at k={k}: {} -> {}", w[0], w[1])));
            }
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[i64] {
        &self.states
    }

    pub fn n(&self) -> usize {
        self.states.len() - 1
    }

    /// `#{k = 1..n : Y*_k ≥ 0} / n`.
    pub fn occupation_fraction(&self) -> f64 {
        self.states[1..].iter().filter(|&&s| s >= 0).count() as f64 / self.n() as f64
    }

    /// `n^{-1/2} Y*_k` on the unit horizon.
    pub fn rescaled(&self) -> PathGrid {
        let scale = 1.0 / (self.n() as f64).sqrt();
        let values = self.states.iter().map(|&s| s as f64 * scale).collect();
        PathGrid::new(1.0, values, PathKind::OrwRescaled).expect("walk states are finite")
    }
}

pub fn simulate_orw(params: &OrwParams, n: usize, rng: &mut RngStream) -> Result<OrwPath> {
    if n == 0 {
        return Err(Error::invalid("walk length must be at least 1"));
    }
    let mut states = Vec::with_capacity(n + 1);
    let mut y = 0i64;
    states.push(y);
    for _ in 0..n {
        let u = rng.uniform();
        let move_prob = match y {
            0 => 1.0,
            y if y > 0 => params.q,
            _ => params.p,
        };
        // u < move_prob/2 → +1, move_prob/2 ≤ u < move_prob → −1
        if u < 0.5 * move_prob {
            y += 1;
        } else if u < move_prob {
            y -= 1;
        }
        states.push(y);
    }
    Ok(OrwPath { states })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveRate {
    /// `α/β`, `None` when `β = 0`.
    pub estimate: Option<f64>,
    pub alpha: u64,
    pub beta: u64,
}

fn move_rate(path: &OrwPath, on_side: impl Fn(i64) -> bool) -> MoveRate {
    let (mut alpha, mut beta) = (0u64, 0u64);
    for w in path.states.windows(2) {
        if on_side(w[0]) {
            beta += 1;
            if w[1] != w[0] {
                alpha += 1;
            }
        }
    }
    MoveRate {
        estimate: (beta > 0).then(|| alpha as f64 / beta as f64),
        alpha,
        beta,
    }
}

/// `q̂ = α/β` over `k = 0..n−1` with `Y*_k > 0`; `α` counts the moves.
pub fn q_hat(path: &OrwPath) -> MoveRate {
    move_rate(path, |s| s > 0)
}

/// Mirror estimator of `p` on the negative side.
pub fn p_hat(path: &OrwPath) -> MoveRate {
    move_rate(path, |s| s < 0)
}
