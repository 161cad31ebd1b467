//! Discrete brackets, occupation fractions, and the volatility and
//! local-time estimators built from them.
//!
//! For a path on `[0, T]` observed at `kT/n`:
//!
//! * `Q̄₊ = (1/n) Σ_{k=1..n} 1(Y_k ≥ 0)`, `Q̄₋ = 1 − Q̄₊`
//! * `σ̂₊² = [Y⁺]ⁿ / (T Q̄₊)` (carries a local-time bias)
//! * `m₊² = [Y⁺, Y]ⁿ / (T Q̄₊)` (asymptotically unbiased)
//!
//! and symmetrically on the negative side. Since `Y = Y⁺ − Y⁻`,
//! `[Y⁺, Y] = [Y⁺] − [Y⁺, Y⁻]`, and every nonzero summand of `[Y⁺, Y⁻]` is
//! `Y_k Y_{k−1} < 0` at a sign change.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::process::{ObmParams, PathGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

/// A one-sided estimate. Paths that never visit a side have no estimate for
/// it; Monte Carlo code must drop those, never average them as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimate {
    Value(f64),
    /// The occupation estimate of the side is 0.
    EmptySide,
    /// The bracket under the square root came out negative.
    NegativeBracket,
}

impl Estimate {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Estimate::Value(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Estimate::Value(_))
    }

    fn map(self, f: impl FnOnce(f64) -> f64) -> Estimate {
        match self {
            Estimate::Value(v) => Estimate::Value(f(v)),
            other => other,
        }
    }
}

/// `Σ_{k≥1} (a_k − a_{k−1})(b_k − b_{k−1})`.
pub fn bracket(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData("bracket needs at least 2 points".into()));
    }
    Ok(a.windows(2)
        .zip(b.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[1] - y[0]))
        .sum())
}

#[inline]
pub fn positive_part(y: f64) -> f64 {
    y.max(0.0)
}

#[inline]
pub fn negative_part(y: f64) -> f64 {
    (-y).max(0.0)
}

/// All discrete brackets of a path, computed in one pass.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Brackets {
    /// `[Y]`
    pub yy: f64,
    /// `[Y⁺]`
    pub pp: f64,
    /// `[Y⁻]`
    pub mm: f64,
    /// `[Y⁺, Y⁻]`
    pub pm: f64,
    /// `[Y⁺, Y]`
    pub py: f64,
    /// `[Y⁻, Y]`
    pub my: f64,
}

impl Brackets {
    pub fn of(values: &[f64]) -> Self {
        let mut b = Brackets::default();
        for w in values.windows(2) {
            let dy = w[1] - w[0];
            let dp = positive_part(w[1]) - positive_part(w[0]);
            let dm = negative_part(w[1]) - negative_part(w[0]);
            b.yy += dy * dy;
            b.pp += dp * dp;
            b.mm += dm * dm;
            b.pm += dp * dm;
            b.py += dp * dy;
            b.my += dm * dy;
        }
        b
    }
}

/// Fraction of `k = 1..n` with `Y_k ≥ 0` (plus) or its complement (minus).
pub fn occupation_estimate(path: &PathGrid, side: Side) -> f64 {
    let plus = occupation_plus(path.values());
    match side {
        Side::Plus => plus,
        Side::Minus => 1.0 - plus,
    }
}

fn occupation_plus(values: &[f64]) -> f64 {
    let n = values.len() - 1;
    values[1..].iter().filter(|&&y| y >= 0.0).count() as f64 / n as f64
}

fn ratio_estimate(bracket: f64, horizon: f64, occupation: f64) -> Estimate {
    if occupation <= 0.0 {
        Estimate::EmptySide
    } else if bracket < 0.0 {
        Estimate::NegativeBracket
    } else {
        Estimate::Value(bracket / (horizon * occupation))
    }
}

/// `(σ̂₊, σ̂₋)`, using `[Y±]ⁿ / (T Q̄±)` under the square root.
pub fn sigma_hat(path: &PathGrid) -> (Estimate, Estimate) {
    let r = EstimateReport::from_path(path);
    (r.sigma_hat_plus(), r.sigma_hat_minus())
}

/// `(m₊, m₋)`, using `[Y⁺, Y]ⁿ / (T Q̄₊)` and `−[Y⁻, Y]ⁿ / (T Q̄₋)` under the
/// square root.
pub fn m_hat(path: &PathGrid) -> (Estimate, Estimate) {
    let r = EstimateReport::from_path(path);
    (r.m_plus(), r.m_minus())
}

/// `√n [Y⁺, Y⁻]ⁿ → K · L₁(Y)` with `K = (2√2/(3√π)) σ₊σ₋/(σ₊ + σ₋)`.
pub fn local_time_constant(sigma_plus: f64, sigma_minus: f64) -> f64 {
    2.0 * 2f64.sqrt() / (3.0 * PI.sqrt()) * sigma_plus * sigma_minus / (sigma_plus + sigma_minus)
}

fn local_time_from_bracket(bracket_pm: f64, n: usize, horizon: f64, sp: f64, sm: f64) -> f64 {
    ((n as f64).sqrt() * bracket_pm / horizon).abs() / local_time_constant(sp, sm)
}

/// Crossing-based local-time estimate `|√n [Y⁺, Y⁻]ⁿ / T| / K`.
///
/// On `[0, T]` this targets `L_T(Y)/√T`, which has the law of `L₁(Y)`.
/// With `sigmas = None` the plug-in values come from [`m_hat`] on the same
/// path.
pub fn local_time_estimate(path: &PathGrid, sigmas: Option<(f64, f64)>) -> Result<f64> {
    let b = Brackets::of(path.values());
    let (sp, sm) = match sigmas {
        Some((sp, sm)) => {
            ObmParams::new(sp, sm)?;
            (sp, sm)
        }
        None => {
            let r = EstimateReport::with_brackets(path, b);
            match (r.m_plus().value(), r.m_minus().value()) {
                (Some(sp), Some(sm)) if sp > 0.0 && sm > 0.0 => (sp, sm),
                _ => {
                    return Err(Error::Undefined(
                        "plug-in volatility undefined on at least one side".into(),
                    ))
                }
            }
        }
    };
    Ok(local_time_from_bracket(b.pm, path.n_steps(), path.horizon(), sp, sm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaStatistic {
    /// `n^{-1/2} Σ_{i=1..n−1} f(Y_i √(n/T))`
    pub statistic: f64,
    /// `leb(f⁺)/σ₊² + leb(f⁻)/σ₋²`
    pub coefficient: f64,
}

impl LambdaStatistic {
    /// `statistic / coefficient`, an estimate of `L₁(Y)`.
    pub fn local_time(&self) -> Option<f64> {
        (self.coefficient != 0.0).then(|| self.statistic / self.coefficient)
    }
}

/// Normalized functional `n^{-1/2} Σ f(Y_i √n)` and its local-time
/// coefficient. `leb_f_plus`/`leb_f_minus` are `∫₀^∞ f` and `∫_{−∞}^0 f`.
///
/// For `T ≠ 1` the path is rescaled to unit horizon first (`Y ↦ Y/√T`).
pub fn lambda_statistic(
    path: &PathGrid,
    f: impl Fn(f64) -> f64,
    leb_f_plus: f64,
    leb_f_minus: f64,
    params: &ObmParams,
) -> LambdaStatistic {
    let n = path.n_steps();
    let scale = (n as f64 / path.horizon()).sqrt();
    let values = path.values();
    let statistic = if n >= 2 {
        values[1..n].iter().map(|&y| f(y * scale)).sum::<f64>() / (n as f64).sqrt()
    } else {
        0.0
    };
    let coefficient = leb_f_plus / params.sigma_plus().powi(2) + leb_f_minus / params.sigma_minus().powi(2);
    LambdaStatistic {
        statistic,
        coefficient,
    }
}

/// Everything the estimators extract from one path.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub n_steps: usize,
    pub horizon: f64,
    pub q_bar_plus: f64,
    pub q_bar_minus: f64,
    pub brackets: Brackets,
    /// Local-time estimate with the `m` plug-in, when both sides are defined.
    pub local_time_hat: Option<f64>,
    pub nonzero_start: bool,
}

impl EstimateReport {
    pub fn from_path(path: &PathGrid) -> Self {
        Self::with_brackets(path, Brackets::of(path.values()))
    }

    fn with_brackets(path: &PathGrid, brackets: Brackets) -> Self {
        let q_bar_plus = occupation_plus(path.values());
        let mut r = EstimateReport {
            n_steps: path.n_steps(),
            horizon: path.horizon(),
            q_bar_plus,
            q_bar_minus: 1.0 - q_bar_plus,
            brackets,
            local_time_hat: None,
            nonzero_start: path.nonzero_start(),
        };
        if let (Some(sp), Some(sm)) = (r.m_plus().value(), r.m_minus().value()) {
            if sp > 0.0 && sm > 0.0 {
                r.local_time_hat = Some(local_time_from_bracket(brackets.pm, r.n_steps, r.horizon, sp, sm));
            }
        }
        r
    }

    pub fn sigma2_hat_plus(&self) -> Estimate {
        ratio_estimate(self.brackets.pp, self.horizon, self.q_bar_plus)
    }

    pub fn sigma2_hat_minus(&self) -> Estimate {
        ratio_estimate(self.brackets.mm, self.horizon, self.q_bar_minus)
    }

    pub fn m2_plus(&self) -> Estimate {
        ratio_estimate(self.brackets.py, self.horizon, self.q_bar_plus)
    }

    pub fn m2_minus(&self) -> Estimate {
        // Y⁻ moves against Y, so the minus-side bracket enters with a flipped sign.
        ratio_estimate(-self.brackets.my, self.horizon, self.q_bar_minus)
    }

    pub fn sigma_hat_plus(&self) -> Estimate {
        self.sigma2_hat_plus().map(f64::sqrt)
    }

    pub fn sigma_hat_minus(&self) -> Estimate {
        self.sigma2_hat_minus().map(f64::sqrt)
    }

    pub fn m_plus(&self) -> Estimate {
        self.m2_plus().map(f64::sqrt)
    }

    pub fn m_minus(&self) -> Estimate {
        self.m2_minus().map(f64::sqrt)
    }

    pub fn bracket_pm(&self) -> f64 {
        self.brackets.pm
    }

    /// Local-time estimate with caller-supplied volatilities.
    pub fn local_time_with(&self, sigma_plus: f64, sigma_minus: f64) -> f64 {
        local_time_from_bracket(self.brackets.pm, self.n_steps, self.horizon, sigma_plus, sigma_minus)
    }

    /// Normalized errors `√n(m±² − σ±²)` and `√n(σ̂±² − σ±²)`.
    pub fn normalized_errors(&self, truth: &ObmParams) -> NormalizedErrors {
        let root_n = (self.n_steps as f64).sqrt();
        let sp2 = truth.sigma_plus().powi(2);
        let sm2 = truth.sigma_minus().powi(2);
        let err = |e: Estimate, s2: f64| e.value().map(|v| root_n * (v - s2));
        NormalizedErrors {
            m_plus: err(self.m2_plus(), sp2),
            m_minus: err(self.m2_minus(), sm2),
            s_plus: err(self.sigma2_hat_plus(), sp2),
            s_minus: err(self.sigma2_hat_minus(), sm2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormalizedErrors {
    pub m_plus: Option<f64>,
    pub m_minus: Option<f64>,
    pub s_plus: Option<f64>,
    pub s_minus: Option<f64>,
}
