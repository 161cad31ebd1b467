//! Exact simulation of skew and oscillating Brownian paths on uniform grids.
//!
//! The OBM `Y` is simulated through the skew Brownian motion `X = Y/σ(Y)`,
//! whose transition density is known in closed form:
//!
//! ```text
//! p_θ(t, x, y) = p(t, x − y) + sgn(y) θ p(t, |x| + |y|)
//! ```
//!
//! with `p` the centered Gaussian kernel of variance `t`. [`SkewStepper`]
//! samples this density exactly, so paths are exact in law at grid times.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Two-valued diffusion coefficient `σ(y) = σ₊ 1(y ≥ 0) + σ₋ 1(y < 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObmParams {
    sigma_plus: f64,
    sigma_minus: f64,
}

impl ObmParams {
    pub fn new(sigma_plus: f64, sigma_minus: f64) -> Result<Self> {
        if !(sigma_plus.is_finite() && sigma_plus > 0.0) {
            return Err(Error::invalid(format!("sigma_plus must be positive, got {sigma_plus}")));
        }
        if !(sigma_minus.is_finite() && sigma_minus > 0.0) {
            return Err(Error::invalid(format!("sigma_minus must be positive, got {sigma_minus}")));
        }
        Ok(Self {
            sigma_plus,
            sigma_minus,
        })
    }

    /// A parameter pair with the given skewness, normalized so that
    /// `σ₊ + σ₋ = 2`.
    pub fn from_theta(theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Self::new(1.0 - theta, 1.0 + theta)
    }

    pub fn sigma_plus(&self) -> f64 {
        self.sigma_plus
    }

    pub fn sigma_minus(&self) -> f64 {
        self.sigma_minus
    }

    /// Skewness of the associated SBM, `(σ₋ − σ₊)/(σ₋ + σ₊)`.
    pub fn theta(&self) -> f64 {
        (self.sigma_minus - self.sigma_plus) / (self.sigma_minus + self.sigma_plus)
    }

    /// `σ₊/σ₋`.
    pub fn ratio(&self) -> f64 {
        self.sigma_plus / self.sigma_minus
    }

    #[inline]
    pub fn sigma_at(&self, y: f64) -> f64 {
        if y >= 0.0 {
            self.sigma_plus
        } else {
            self.sigma_minus
        }
    }

    /// OBM → SBM coordinates, `x = y/σ(y)`.
    #[inline]
    pub fn to_skew(&self, y: f64) -> f64 {
        y / self.sigma_at(y)
    }

    /// SBM → OBM coordinates, inverse of [`ObmParams::to_skew`].
    #[inline]
    pub fn from_skew(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.sigma_plus * x
        } else {
            self.sigma_minus * x
        }
    }

    /// `2σ₊σ₋/(σ₊ + σ₋)`, the factor with `L(Y) = factor · L(X)`.
    pub fn local_time_factor(&self) -> f64 {
        2.0 * self.sigma_plus * self.sigma_minus / (self.sigma_plus + self.sigma_minus)
    }
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > -1.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("theta must lie in (-1, 1), got {theta}")))
    }
}

fn check_grid(horizon: f64, n: usize) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if n == 0 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    Sbm,
    Obm,
    ObmDrift,
    OrwRescaled,
}

impl PathKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathKind::Sbm => "sbm",
            PathKind::Obm => "obm",
            PathKind::ObmDrift => "obm_drift",
            PathKind::OrwRescaled => "orw_rescaled",
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A trajectory sampled at `t_k = kT/n`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    horizon: f64,
    values: Vec<f64>,
    kind: PathKind,
}

impl PathGrid {
    pub fn new(horizon: f64, values: Vec<f64>, kind: PathKind) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "a path needs at least 2 grid values, got {}",
                values.len()
            )));
        }
        check_grid(horizon, values.len() - 1)?;
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite path value at k={k}")));
        }
        Ok(Self {
            horizon,
            values,
            kind,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn time(&self, k: usize) -> f64 {
        self.horizon * k as f64 / self.n_steps() as f64
    }

    /// True when the path does not start at 0. The limit theorems assume
    /// `Y₀ = 0`; reports carry this flag.
    pub fn nonzero_start(&self) -> bool {
        self.values[0] != 0.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Closed-form SBM transition density `p_θ(t, x, y)`.
pub fn sbm_transition_density(theta: f64, t: f64, x: f64, y: f64) -> Result<f64> {
    if !(theta.is_finite() && t.is_finite() && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain("non-finite input to sbm_transition_density".into()));
    }
    check_theta(theta)?;
    if t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let sgn = if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(gauss(t, x - y) + sgn * theta * gauss(t, x.abs() + y.abs()))
}

#[inline]
fn gauss(t: f64, z: f64) -> f64 {
    (-z * z / (2.0 * t)).exp() / (2.0 * PI * t).sqrt()
}

/// Exact one-step sampler of the SBM transition for a fixed `(θ, dt)`.
///
/// In the frame where the current point is nonnegative, draw `y = x + g`
/// with `g ~ N(0, dt)`. A negative `y` means the Gaussian path crossed 0. A
/// nonnegative `y` hides a crossing with probability `exp(−2xy/dt)`, which
/// is the reflection identity `p(t, y − x) e^{−2xy/t} = p(t, y + x)`. After a
/// crossing the excursion sign is resampled, positive with probability
/// `(1 + θ)/2`. Negative points are handled in the mirror frame `(−x, −θ)`,
/// with the frame picked by the sign bit of `x`.
#[derive(Debug, Clone, Copy)]
pub struct SkewStepper {
    theta: f64,
    dt: f64,
    sqrt_dt: f64,
}

impl SkewStepper {
    pub fn new(theta: f64, dt: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!("dt must be positive, got {dt}")));
        }
        Ok(Self {
            theta,
            dt,
            sqrt_dt: dt.sqrt(),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn step(&self, x: f64, rng: &mut RngStream) -> f64 {
        if x.is_sign_negative() {
            -self.step_canonical(-x, -self.theta, rng)
        } else {
            self.step_canonical(x, self.theta, rng)
        }
    }

    #[inline]
    fn step_canonical(&self, x: f64, theta: f64, rng: &mut RngStream) -> f64 {
        let y = x + self.sqrt_dt * rng.normal();
        let u = rng.uniform();
        let p_plus = 0.5 * (1.0 + theta);
        if y < 0.0 {
            if u < p_plus {
                -y
            } else {
                y
            }
        } else {
            let p_cross = (-2.0 * x * y / self.dt).exp();
            if u < p_cross {
                // u / p_cross is uniform on [0, 1) given a crossing.
                if u < p_cross * p_plus {
                    y
                } else {
                    -y
                }
            } else {
                y
            }
        }
    }
}

/// One exact SBM step from `x` over `dt`.
pub fn sbm_step(x: f64, theta: f64, dt: f64, rng: &mut RngStream) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("non-finite start {x}")));
    }
    Ok(SkewStepper::new(theta, dt)?.step(x, rng))
}

pub fn simulate_sbm(
    theta: f64,
    x0: f64,
    horizon: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<PathGrid> {
    check_grid(horizon, n)?;
    if !x0.is_finite() {
        return Err(Error::Domain(format!("non-finite start {x0}")));
    }
    let stepper = SkewStepper::new(theta, horizon / n as f64)?;
    let mut values = Vec::with_capacity(n + 1);
    let mut x = x0;
    values.push(x);
    for _ in 0..n {
        x = stepper.step(x, rng);
        values.push(x);
    }
    Ok(PathGrid {
        horizon,
        values,
        kind: PathKind::Sbm,
    })
}

/// OBM path from `Y₀ = 0`.
pub fn simulate_obm(params: &ObmParams, horizon: f64, n: usize, rng: &mut RngStream) -> Result<PathGrid> {
    simulate_obm_from(params, 0.0, horizon, n, rng)
}

/// OBM path from an arbitrary start; see [`PathGrid::nonzero_start`].
pub fn simulate_obm_from(
    params: &ObmParams,
    y0: f64,
    horizon: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<PathGrid> {
    let skew = simulate_sbm(params.theta(), params.to_skew(y0), horizon, n, rng)?;
    let values = skew.values.iter().map(|&x| params.from_skew(x)).collect();
    Ok(PathGrid {
        horizon,
        values,
        kind: PathKind::Obm,
    })
}

/// A drift with a caller-declared sup bound.
#[derive(Clone)]
pub struct BoundedDrift {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: f64,
}

impl BoundedDrift {
    /// Wraps `f` after probing it on a wide log-spaced grid; any probe with
    /// `|f(y)| > bound` (or a non-finite value) rejects the drift.
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(Error::invalid(format!("drift bound must be finite and nonnegative, got {bound}")));
        }
        let probes = std::iter::once(0.0).chain((-60..=60).flat_map(|e| {
            let m = 10f64.powf(e as f64 / 10.0);
            [m, -m]
        }));
        for y in probes {
            let v = f(y);
            if !v.is_finite() || v.abs() > bound {
                return Err(Error::invalid(format!(
                    "drift exceeds declared bound {bound} at y={y} (value {v})"
                )));
            }
        }
        Ok(Self {
            f: Arc::new(f),
            bound,
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }
}

impl fmt::Debug for BoundedDrift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundedDrift").field("bound", &self.bound).finish()
    }
}

#[derive(Debug, Clone)]
pub enum DriftSpec {
    None,
    /// SET-Vasicek mean reversion `b(y) = −α(y − β)`.
    Vasicek { alpha: f64, beta: f64 },
    Custom(BoundedDrift),
}

impl DriftSpec {
    pub fn vasicek(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::invalid("vasicek parameters must be finite"));
        }
        Ok(DriftSpec::Vasicek { alpha, beta })
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            DriftSpec::None => 0.0,
            DriftSpec::Vasicek { alpha, beta } => -alpha * (y - beta),
            DriftSpec::Custom(b) => b.eval(y),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DriftSpec::None)
    }

    pub fn describe(&self) -> String {
        match self {
            DriftSpec::None => "none".into(),
            DriftSpec::Vasicek { alpha, beta } => format!("vasicek:{alpha},{beta}"),
            DriftSpec::Custom(b) => format!("custom(bound={})", b.bound),
        }
    }
}

/// Drifted OBM by Lie splitting: an exact OBM step of size `T/n`, then the
/// explicit increment `b(y)·T/n`. First order in `T/n`.
///
/// With [`DriftSpec::None`] the output is bit-identical to [`simulate_obm`]
/// on the same stream.
pub fn simulate_obm_drift(
    params: &ObmParams,
    drift: &DriftSpec,
    horizon: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<PathGrid> {
    if drift.is_none() {
        let mut path = simulate_obm(params, horizon, n, rng)?;
        path.kind = PathKind::ObmDrift;
        return Ok(path);
    }
    check_grid(horizon, n)?;
    let dt = horizon / n as f64;
    let stepper = SkewStepper::new(params.theta(), dt)?;
    let mut values = Vec::with_capacity(n + 1);
    let mut y = 0.0;
    values.push(y);
    for k in 0..n {
        let diffused = params.from_skew(stepper.step(params.to_skew(y), rng));
        y = diffused + drift.eval(diffused) * dt;
        if !y.is_finite() {
            return Err(Error::Domain(format!("drifted path diverged at step {}", k + 1)));
        }
        values.push(y);
    }
    Ok(PathGrid {
        horizon,
        values,
        kind: PathKind::ObmDrift,
    })
}
