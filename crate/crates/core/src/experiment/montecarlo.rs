//! Monte Carlo comparison of the normalized estimator errors with draws
//! from their limit laws, and the six density panels built from it.

use crate::error::{Error, Result};
use crate::estimators::{EstimateReport, NormalizedErrors};
use crate::limit_laws::{sample_limit, LimitSample};
use crate::process::{simulate_obm, ObmParams};
use crate::rng::{RngStream, StreamDomain};
use crate::stats::{self, ks_two_sample, kde_on_grid, linspace, quantile_sorted, robust_bandwidth, Summary};

use super::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    M,
    SigmaHat,
    Both,
}

impl EstimatorChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorChoice::M => "m",
            EstimatorChoice::SigmaHat => "sigma-hat",
            EstimatorChoice::Both => "both",
        }
    }

    pub fn includes(&self, column: ErrorColumn) -> bool {
        match self {
            EstimatorChoice::Both => true,
            EstimatorChoice::M => matches!(column, ErrorColumn::MPlus | ErrorColumn::MMinus),
            EstimatorChoice::SigmaHat => matches!(column, ErrorColumn::SPlus | ErrorColumn::SMinus),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorColumn {
    MPlus,
    MMinus,
    SPlus,
    SMinus,
}

impl ErrorColumn {
    pub const ALL: [ErrorColumn; 4] = [ErrorColumn::MPlus, ErrorColumn::MMinus, ErrorColumn::SPlus, ErrorColumn::SMinus];

    pub fn name(&self) -> &'static str {
        match self {
            ErrorColumn::MPlus => "M_plus",
            ErrorColumn::MMinus => "M_minus",
            ErrorColumn::SPlus => "S_plus",
            ErrorColumn::SMinus => "S_minus",
        }
    }

    pub fn empirical(&self, e: &NormalizedErrors) -> Option<f64> {
        match self {
            ErrorColumn::MPlus => e.m_plus,
            ErrorColumn::MMinus => e.m_minus,
            ErrorColumn::SPlus => e.s_plus,
            ErrorColumn::SMinus => e.s_minus,
        }
    }

    pub fn limit(&self, s: &LimitSample) -> f64 {
        match self {
            ErrorColumn::MPlus => s.m_plus,
            ErrorColumn::MMinus => s.m_minus,
            ErrorColumn::SPlus => s.s_plus,
            ErrorColumn::SMinus => s.s_minus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub params: ObmParams,
    pub horizon: f64,
    pub n_steps: usize,
    pub paths: usize,
    pub limit_draws: usize,
    pub seed: u64,
    pub estimator: EstimatorChoice,
}

impl MonteCarloConfig {
    /// The reference experiment: `T = 5`, `n = 500`, `σ₊ = 2`, `σ₋ = 0.5`,
    /// `10⁴` paths against `10⁵` limit draws.
    pub fn reference(seed: u64) -> Self {
        Self {
            params: ObmParams::new(2.0, 0.5).expect("valid constants"),
            horizon: 5.0,
            n_steps: 500,
            paths: 10_000,
            limit_draws: 100_000,
            seed,
            estimator: EstimatorChoice::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun {
    pub config: MonteCarloConfig,
    /// One entry per path, columns outside the estimator choice blanked.
    pub errors: Vec<NormalizedErrors>,
    pub limits: Vec<LimitSample>,
}

impl MonteCarloRun {
    /// Defined empirical values of a column.
    pub fn empirical(&self, column: ErrorColumn) -> Vec<f64> {
        self.errors.iter().filter_map(|e| column.empirical(e)).collect()
    }

    pub fn limit(&self, column: ErrorColumn) -> Vec<f64> {
        self.limits.iter().map(|s| column.limit(s)).collect()
    }
}

/// Path `i` uses stream `(seed, Paths, i)`, limit draw `j` uses
/// `(seed, LimitDraws, j)`.
pub fn run_montecarlo(config: &MonteCarloConfig, threads: usize) -> Result<MonteCarloRun> {
    if config.paths == 0 || config.limit_draws == 0 {
        return Err(Error::invalid("paths and limit draws must be positive"));
    }
    let params = config.params;
    let errors = par_map(config.paths, threads, |id| {
        let mut rng = RngStream::derive(config.seed, StreamDomain::Paths, id);
        let path = simulate_obm(&params, config.horizon, config.n_steps, &mut rng)?;
        let mut e = EstimateReport::from_path(&path).normalized_errors(&params);
        if !config.estimator.includes(ErrorColumn::MPlus) {
            e.m_plus = None;
            e.m_minus = None;
        }
        if !config.estimator.includes(ErrorColumn::SPlus) {
            e.s_plus = None;
            e.s_minus = None;
        }
        Ok(e)
    })?;
    let limits = par_map(config.limit_draws, threads, |id| {
        let mut rng = RngStream::derive(config.seed, StreamDomain::LimitDraws, id);
        Ok(sample_limit(&params, &mut rng))
    })?;
    Ok(MonteCarloRun {
        config: config.clone(),
        errors,
        limits,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSummary {
    pub column: ErrorColumn,
    pub defined: usize,
    pub ks: f64,
    pub empirical: Summary,
    pub limit: Summary,
}

/// Two-sample KS, means and trimmed variances for each selected column.
pub fn summarize_run(run: &MonteCarloRun) -> Result<Vec<ColumnSummary>> {
    ErrorColumn::ALL
        .iter()
        .filter(|c| run.config.estimator.includes(**c))
        .map(|&column| {
            let emp = run.empirical(column);
            let lim = run.limit(column);
            if emp.is_empty() {
                return Err(Error::InsufficientData(format!("no path defines {}", column.name())));
            }
            Ok(ColumnSummary {
                column,
                defined: emp.len(),
                ks: ks_two_sample(&emp, &lim)?,
                empirical: stats::summarize(&emp)?,
                limit: stats::summarize(&lim)?,
            })
        })
        .collect()
}

pub fn render_summary(rows: &[ColumnSummary]) -> String {
    let mut s = String::from("column\tdefined\tks\tmean\tlimit_mean\ttrimmed_var\tlimit_trimmed_var\n");
    for r in rows {
        s.push_str(&format!(
            "{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\n",
            r.column.name(),
            r.defined,
            r.ks,
            r.empirical.mean,
            r.limit.mean,
            r.empirical.trimmed_variance,
            r.limit.trimmed_variance
        ));
    }
    s
}

/// Paired density curves on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: &'static str,
    pub first: ErrorColumn,
    /// `true`: the second curve is the limit law of `first`; `false`: it is
    /// the empirical density of the biased counterpart.
    pub versus_limit: bool,
    pub grid: Vec<f64>,
    pub empirical_density: Vec<f64>,
    pub limit_density: Vec<f64>,
}

impl Panel {
    /// Trapezoid `∫|f − g|` over the panel grid.
    pub fn l1_distance(&self) -> f64 {
        let diff: Vec<f64> = self
            .empirical_density
            .iter()
            .zip(&self.limit_density)
            .map(|(a, b)| (a - b).abs())
            .collect();
        stats::trapezoid(&self.grid, &diff)
    }

    pub fn rows(&self) -> impl Iterator<Item = [String; 3]> + '_ {
        (0..self.grid.len()).map(|i| {
            [
                self.grid[i].to_string(),
                self.empirical_density[i].to_string(),
                self.limit_density[i].to_string(),
            ]
        })
    }
}

pub const PANEL_GRID_POINTS: usize = 512;

fn paired_curves(a: &[f64], b: &[f64]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if a.len() < 10 || b.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "density panel needs at least 10 values per curve, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut union: Vec<f64> = a.iter().chain(b).copied().collect();
    union.sort_by(f64::total_cmp);
    let lo = quantile_sorted(&union, 0.005);
    let hi = quantile_sorted(&union, 0.995);
    let grid = linspace(lo, hi, PANEL_GRID_POINTS);
    let fa = kde_on_grid(a, robust_bandwidth(a), grid.clone())?;
    let fb = kde_on_grid(b, robust_bandwidth(b), grid.clone())?;
    Ok((grid, fa.values, fb.values))
}

/// Panels (a)–(f): `M₊` vs limit, `S₊` vs limit, `M₊` vs `S₊`, then the
/// same three on the negative side.
pub fn figure_panels(run: &MonteCarloRun) -> Result<Vec<Panel>> {
    use ErrorColumn::*;
    let layout = [
        ("a", MPlus, None),
        ("b", SPlus, None),
        ("c", MPlus, Some(SPlus)),
        ("d", MMinus, None),
        ("e", SMinus, None),
        ("f", MMinus, Some(SMinus)),
    ];
    layout
        .iter()
        .map(|&(name, first, other)| {
            let a = run.empirical(first);
            let b = match other {
                Some(col) => run.empirical(col),
                None => run.limit(first),
            };
            let (grid, fa, fb) = paired_curves(&a, &b)?;
            Ok(Panel {
                name,
                first,
                versus_limit: other.is_none(),
                grid,
                empirical_density: fa,
                limit_density: fb,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64, estimator: EstimatorChoice) -> MonteCarloConfig {
        MonteCarloConfig {
            paths: 300,
            limit_draws: 2000,
            n_steps: 100,
            estimator,
            ..MonteCarloConfig::reference(seed)
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = small(5, EstimatorChoice::Both);
        assert_eq!(run_montecarlo(&cfg, 1).unwrap(), run_montecarlo(&cfg, 4).unwrap());
    }

    #[test]
    fn estimator_choice_blanks_columns() {
        let run = run_montecarlo(&small(5, EstimatorChoice::M), 2).unwrap();
        assert!(run.errors.iter().all(|e| e.s_plus.is_none() && e.s_minus.is_none()));
        assert!(run.errors.iter().any(|e| e.m_minus.is_some()));
        let rows = summarize_run(&run).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(render_summary(&rows).starts_with("column\t"));
    }

    #[test]
    fn panels_have_six_unit_mass_curves() {
        let run = run_montecarlo(&small(6, EstimatorChoice::Both), 2).unwrap();
        let panels = figure_panels(&run).unwrap();
        assert_eq!(panels.len(), 6);
        for p in &panels {
            assert_eq!(p.grid.len(), PANEL_GRID_POINTS);
            assert!(p.l1_distance() < 2.0);
            assert!(p.empirical_density.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
        assert!(!panels[2].versus_limit && panels[0].versus_limit);
    }
}
