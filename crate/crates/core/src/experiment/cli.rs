//! Argument definitions and command runners for the `oscillvol` binary.
//!
//! Every command writes its outputs plus a manifest. Exit codes: 0 success,
//! 2 usage error, 3 data error, 4 failed `--check` threshold.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimators::EstimateReport;
use crate::limit_laws::{sample_limit, sample_local_time_sbm, sample_occupation, sample_occupation_local_time, sample_orw_limit};
use crate::orw::{q_hat, simulate_orw, OrwParams};
use crate::process::{simulate_obm, simulate_obm_drift, DriftSpec, ObmParams, PathGrid};
use crate::rng::{RngStream, StreamDomain};
use crate::stats::ks_two_sample;

use super::manifest::RunManifest;
use super::montecarlo::{figure_panels, render_summary, run_montecarlo, summarize_run, EstimatorChoice, MonteCarloConfig};
use super::table::{self, fmt_opt, header_line, write_csv};
use super::{par_map, worker_count};

/// KS threshold applied by `--check`.
pub const CHECK_KS_THRESHOLD: f64 = 0.05;
/// Below this many paths a KS distance says little; `--force` overrides.
pub const MIN_MONTECARLO_PATHS: usize = 100;

#[derive(Debug, Parser)]
#[command(name = "oscillvol", version, about = "Oscillating Brownian motion: simulation, estimation and limit-law checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate OBM paths on a uniform grid.
    Simulate(SimulateArgs),
    /// Run the estimators on every path of a simulate-schema CSV.
    Estimate(EstimateArgs),
    /// Compare normalized estimator errors with limit-law draws.
    Montecarlo(MonteCarloArgs),
    /// Draw from one of the limit laws.
    LimitSample(LimitSampleArgs),
    /// Simulate oscillating random walks and estimate the move rate.
    Orw(OrwArgs),
    /// Write the six density panels of the reference experiment.
    Figure1(Figure1Args),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub sigma_plus: f64,
    #[arg(long)]
    pub sigma_minus: f64,
    /// Horizon T.
    #[arg(long = "t")]
    pub horizon: f64,
    /// Number of steps.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// `vasicek:ALPHA,BETA` or `none`.
    #[arg(long)]
    pub drift: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Volatilities for the local-time estimate (default: the m plug-in).
    #[arg(long, requires = "sigma_minus")]
    pub sigma_plus: Option<f64>,
    #[arg(long, requires = "sigma_plus")]
    pub sigma_minus: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    M,
    SigmaHat,
    Both,
}

impl From<EstimatorArg> for EstimatorChoice {
    fn from(a: EstimatorArg) -> Self {
        match a {
            EstimatorArg::M => EstimatorChoice::M,
            EstimatorArg::SigmaHat => EstimatorChoice::SigmaHat,
            EstimatorArg::Both => EstimatorChoice::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// `n` steps on `[0, T]`.
    HighFrequency,
    /// Unit spacing, `n = T`.
    LongTime,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub paths: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "t")]
    pub horizon: f64,
    #[arg(long)]
    pub sigma_plus: f64,
    #[arg(long)]
    pub sigma_minus: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::Both)]
    pub estimator: EstimatorArg,
    #[arg(long, default_value_t = 100_000)]
    pub limit_draws: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::HighFrequency)]
    pub mode: ModeArg,
    /// Allow fewer than 100 paths.
    #[arg(long)]
    pub force: bool,
    /// Exit with code 4 when any KS distance reaches 0.05.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    Occupation,
    LocalTimeSbm,
    LocalTimeObm,
    Biased,
    Unbiased,
    OrwLimit,
}

impl LawArg {
    fn name(&self) -> &'static str {
        match self {
            LawArg::Occupation => "occupation",
            LawArg::LocalTimeSbm => "local-time-sbm",
            LawArg::LocalTimeObm => "local-time-obm",
            LawArg::Biased => "biased",
            LawArg::Unbiased => "unbiased",
            LawArg::OrwLimit => "orw-limit",
        }
    }

    fn header(&self) -> &'static [&'static str] {
        match self {
            LawArg::Occupation => &["draw_id", "lambda"],
            LawArg::LocalTimeSbm => &["draw_id", "local_time"],
            LawArg::LocalTimeObm => &["draw_id", "lambda", "local_time"],
            LawArg::Biased => &["draw_id", "S_plus", "S_minus", "lambda", "xi"],
            LawArg::Unbiased => &["draw_id", "M_plus", "M_minus", "lambda", "xi"],
            LawArg::OrwLimit => &["draw_id", "value"],
        }
    }
}

#[derive(Debug, Args)]
pub struct LimitSampleArgs {
    #[arg(long, value_enum)]
    pub which: LawArg,
    #[arg(long, default_value_t = 100_000)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sigma_plus: Option<f64>,
    #[arg(long)]
    pub sigma_minus: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OrwArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub walks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub limit_draws: usize,
    /// Exit with code 4 when the KS distance reaches 0.05.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Figure1Args {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "t", default_value_t = 5.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 2.0)]
    pub sigma_plus: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma_minus: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 100_000)]
    pub limit_draws: usize,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Replace the recorded output location.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CheckFailed,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::CheckFailed => 4,
        }
    }
}

/// Parameter problems are usage errors (2); everything else is a data
/// error (3).
pub fn error_exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => 2,
        _ => 3,
    }
}

/// Runs a parsed command. `argv` (without the program name) is recorded in
/// the manifest for replay.
pub fn execute(cli: &Cli, argv: Vec<String>) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate(a) => simulate(a, argv),
        Command::Estimate(a) => estimate(a, argv),
        Command::Montecarlo(a) => montecarlo(a, argv),
        Command::LimitSample(a) => limit_sample(a, argv),
        Command::Orw(a) => orw(a, argv),
        Command::Figure1(a) => figure1(a, argv),
        Command::Replay(a) => replay(a),
    }
}

/// Parses and runs `args` (without the program name).
pub fn execute_args(args: &[String]) -> Result<Outcome> {
    let cli = Cli::try_parse_from(std::iter::once("oscillvol".to_string()).chain(args.iter().cloned()))
        .map_err(|e| Error::invalid(e.to_string()))?;
    execute(&cli, args.to_vec())
}

/// Manifest written next to single-file outputs.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn parse_drift(spec: Option<&str>) -> Result<DriftSpec> {
    let Some(spec) = spec else {
        return Ok(DriftSpec::None);
    };
    if spec == "none" {
        return Ok(DriftSpec::None);
    }
    let bad = || Error::invalid(format!("drift must be vasicek:ALPHA,BETA or none, got {spec:?}"));
    let rest = spec.strip_prefix("vasicek:").ok_or_else(bad)?;
    let (a, b) = rest.split_once(',').ok_or_else(bad)?;
    let alpha = a.trim().parse().map_err(|_| bad())?;
    let beta = b.trim().parse().map_err(|_| bad())?;
    DriftSpec::vasicek(alpha, beta)
}

fn simulate(a: &SimulateArgs, argv: Vec<String>) -> Result<Outcome> {
    let params = ObmParams::new(a.sigma_plus, a.sigma_minus)?;
    let drift = parse_drift(a.drift.as_deref())?;
    if a.paths == 0 {
        return Err(Error::invalid("--paths must be positive"));
    }
    let threads = worker_count()?;
    let paths: Vec<PathGrid> = par_map(a.paths, threads, |id| {
        let mut rng = RngStream::derive(a.seed, StreamDomain::Paths, id);
        if a.drift.is_some() {
            simulate_obm_drift(&params, &drift, a.horizon, a.n, &mut rng)
        } else {
            simulate_obm(&params, a.horizon, a.n, &mut rng)
        }
    })?;
    write_csv(&a.out, table::PATHS_HEADER, paths.iter().enumerate().flat_map(|(id, p)| table::path_rows(id as u64, p)))?;

    let mut m = RunManifest::new("simulate", a.seed, argv);
    m.param("sigma_plus", a.sigma_plus)
        .param("sigma_minus", a.sigma_minus)
        .param("t", a.horizon)
        .param("n", a.n)
        .param("paths", a.paths)
        .param("drift", drift.describe())
        .param("kind", paths[0].kind())
        .param("theta", params.theta());
    m.output(&file_name(&a.out), &header_line(table::PATHS_HEADER));
    m.write(&manifest_path_for(&a.out))?;
    Ok(Outcome::Success)
}

fn estimate(a: &EstimateArgs, argv: Vec<String>) -> Result<Outcome> {
    let sigmas = match (a.sigma_plus, a.sigma_minus) {
        (Some(sp), Some(sm)) => {
            let p = ObmParams::new(sp, sm)?;
            Some((p.sigma_plus(), p.sigma_minus()))
        }
        _ => None,
    };
    let paths = table::read_paths(&a.input)?;
    let rows = paths.iter().map(|(id, path)| {
        let r = EstimateReport::from_path(path);
        let lt = match sigmas {
            Some((sp, sm)) => Some(r.local_time_with(sp, sm)),
            None => r.local_time_hat,
        };
        [
            id.to_string(),
            fmt_opt(r.sigma_hat_plus().value()),
            fmt_opt(r.sigma_hat_minus().value()),
            fmt_opt(r.m_plus().value()),
            fmt_opt(r.m_minus().value()),
            r.q_bar_plus.to_string(),
            fmt_opt(lt),
            r.bracket_pm().to_string(),
            r.m_plus().is_defined().to_string(),
            r.m_minus().is_defined().to_string(),
        ]
    });
    write_csv(&a.out, table::ESTIMATE_HEADER, rows)?;

    let mut m = RunManifest::new("estimate", 0, argv);
    m.param("input", a.input.display())
        .param("paths", paths.len())
        .param("local_time_plugin", if sigmas.is_some() { "given" } else { "m_hat" });
    if let Some((sp, sm)) = sigmas {
        m.param("sigma_plus", sp).param("sigma_minus", sm);
    }
    m.output(&file_name(&a.out), &header_line(table::ESTIMATE_HEADER));
    m.write(&manifest_path_for(&a.out))?;
    Ok(Outcome::Success)
}

fn montecarlo(a: &MonteCarloArgs, argv: Vec<String>) -> Result<Outcome> {
    if a.paths < MIN_MONTECARLO_PATHS && !a.force {
        return Err(Error::invalid(format!(
            "--paths {} is below {MIN_MONTECARLO_PATHS}; KS distances would be meaningless (use --force)",
            a.paths
        )));
    }
    let n_steps = match a.mode {
        ModeArg::HighFrequency => a.n.ok_or_else(|| Error::invalid("--n is required in high-frequency mode"))?,
        ModeArg::LongTime => {
            if !(a.horizon >= 1.0 && a.horizon.fract() == 0.0) {
                return Err(Error::invalid(format!("long-time mode needs an integer --t, got {}", a.horizon)));
            }
            let n = a.horizon as usize;
            if a.n.is_some_and(|given| given != n) {
                return Err(Error::invalid("long-time mode sets n = T; drop --n or make it equal"));
            }
            n
        }
    };
    let config = MonteCarloConfig {
        params: ObmParams::new(a.sigma_plus, a.sigma_minus)?,
        horizon: a.horizon,
        n_steps,
        paths: a.paths,
        limit_draws: a.limit_draws,
        seed: a.seed,
        estimator: a.estimator.into(),
    };
    let run = run_montecarlo(&config, worker_count()?)?;
    create_dir(&a.out_dir)?;

    let errors_file = a.out_dir.join("errors.csv");
    write_csv(
        &errors_file,
        table::ERRORS_HEADER,
        run.errors.iter().enumerate().map(|(id, e)| {
            [id.to_string(), fmt_opt(e.m_plus), fmt_opt(e.m_minus), fmt_opt(e.s_plus), fmt_opt(e.s_minus)]
        }),
    )?;
    let limit_file = a.out_dir.join("limit.csv");
    write_csv(
        &limit_file,
        table::LIMIT_HEADER,
        run.limits.iter().enumerate().map(|(id, s)| {
            [
                id.to_string(),
                s.m_plus.to_string(),
                s.m_minus.to_string(),
                s.s_plus.to_string(),
                s.s_minus.to_string(),
                s.lambda_occ.to_string(),
                s.xi.to_string(),
            ]
        }),
    )?;

    let summary = summarize_run(&run)?;
    print!("{}", render_summary(&summary));
    let passed = summary.iter().all(|r| r.ks < CHECK_KS_THRESHOLD);

    let mut m = RunManifest::new("montecarlo", a.seed, argv);
    m.param("sigma_plus", a.sigma_plus)
        .param("sigma_minus", a.sigma_minus)
        .param("t", a.horizon)
        .param("n", n_steps)
        .param("mode", if a.mode == ModeArg::LongTime { "long-time" } else { "high-frequency" })
        .param("paths", a.paths)
        .param("limit_draws", a.limit_draws)
        .param("estimator", config.estimator.as_str());
    m.output("errors.csv", &header_line(table::ERRORS_HEADER));
    m.output("limit.csv", &header_line(table::LIMIT_HEADER));
    m.write(&a.out_dir.join("manifest.txt"))?;

    if a.check && !passed {
        eprintln!("check failed: some KS distance is at least {CHECK_KS_THRESHOLD}");
        return Ok(Outcome::CheckFailed);
    }
    Ok(Outcome::Success)
}

fn need(v: Option<f64>, flag: &str, law: LawArg) -> Result<f64> {
    v.ok_or_else(|| Error::invalid(format!("--which {} needs --{flag}", law.name())))
}

fn limit_sample(a: &LimitSampleArgs, argv: Vec<String>) -> Result<Outcome> {
    let law = a.which;
    let mut m = RunManifest::new("limit-sample", a.seed, argv);
    m.param("which", law.name()).param("count", a.count);
    let obm = || -> Result<ObmParams> {
        ObmParams::new(need(a.sigma_plus, "sigma-plus", law)?, need(a.sigma_minus, "sigma-minus", law)?)
    };
    let (params, theta, pq) = match law {
        LawArg::LocalTimeSbm => (None, Some(need(a.theta, "theta", law)?), None),
        LawArg::OrwLimit => {
            let p = need(a.p, "p", law)?;
            let q = need(a.q, "q", law)?;
            OrwParams::new(p, q)?;
            (None, None, Some((p, q)))
        }
        _ => (Some(obm()?), None, None),
    };
    if let Some(p) = params {
        m.param("sigma_plus", p.sigma_plus()).param("sigma_minus", p.sigma_minus());
    }
    if let Some(t) = theta {
        m.param("theta", t);
    }
    if let Some((p, q)) = pq {
        m.param("p", p).param("q", q);
    }

    let rows = par_map(a.count, worker_count()?, |id| {
        let mut rng = RngStream::derive(a.seed, StreamDomain::LimitSample, id);
        let mut row = vec![id.to_string()];
        match law {
            LawArg::Occupation => {
                row.push(sample_occupation(params.as_ref().expect("set above"), &mut rng).to_string());
            }
            LawArg::LocalTimeSbm => {
                row.push(sample_local_time_sbm(theta.expect("set above"), &mut rng)?.to_string());
            }
            LawArg::LocalTimeObm => {
                let (occ, lt) = sample_occupation_local_time(params.as_ref().expect("set above"), &mut rng);
                row.push(occ.lambda.to_string());
                row.push(lt.to_string());
            }
            LawArg::Biased | LawArg::Unbiased => {
                let s = sample_limit(params.as_ref().expect("set above"), &mut rng);
                let pair = if law == LawArg::Biased { [s.s_plus, s.s_minus] } else { [s.m_plus, s.m_minus] };
                row.extend(pair.iter().map(f64::to_string));
                row.push(s.lambda_occ.to_string());
                row.push(s.xi.to_string());
            }
            LawArg::OrwLimit => {
                let (p, q) = pq.expect("set above");
                row.push(sample_orw_limit(q, p, &mut rng)?.to_string());
            }
        }
        Ok(row)
    })?;
    write_csv(&a.out, law.header(), rows)?;
    m.output(&file_name(&a.out), &header_line(law.header()));
    m.write(&manifest_path_for(&a.out))?;
    Ok(Outcome::Success)
}

/// Per-walk estimates plus `√n(q̂ − q)` for the walks where `q̂` is defined.
pub struct OrwRun {
    pub rows: Vec<[String; 5]>,
    pub normalized: Vec<f64>,
    pub limit: Vec<f64>,
}

pub fn run_orw(params: &OrwParams, n: usize, walks: usize, limit_draws: usize, seed: u64, threads: usize) -> Result<OrwRun> {
    let per_walk = par_map(walks, threads, |id| {
        let mut rng = RngStream::derive(seed, StreamDomain::Walks, id);
        let path = simulate_orw(params, n, &mut rng)?;
        Ok((q_hat(&path), path.occupation_fraction()))
    })?;
    let limit = par_map(limit_draws, threads, |id| {
        let mut rng = RngStream::derive(seed, StreamDomain::OrwLimit, id);
        sample_orw_limit(params.q(), params.p(), &mut rng)
    })?;
    let root_n = (n as f64).sqrt();
    let normalized = per_walk
        .iter()
        .filter_map(|(r, _)| r.estimate.map(|q| root_n * (q - params.q())))
        .collect();
    let rows = per_walk
        .iter()
        .enumerate()
        .map(|(id, (r, occ))| {
            [id.to_string(), fmt_opt(r.estimate), r.alpha.to_string(), r.beta.to_string(), occ.to_string()]
        })
        .collect();
    Ok(OrwRun {
        rows,
        normalized,
        limit,
    })
}

fn orw(a: &OrwArgs, argv: Vec<String>) -> Result<Outcome> {
    let params = OrwParams::new(a.p, a.q)?;
    if a.walks == 0 || a.limit_draws == 0 {
        return Err(Error::invalid("--walks and --limit-draws must be positive"));
    }
    let run = run_orw(&params, a.n, a.walks, a.limit_draws, a.seed, worker_count()?)?;
    write_csv(&a.out, table::ORW_HEADER, &run.rows)?;
    let ks = if run.normalized.is_empty() {
        None
    } else {
        Some(ks_two_sample(&run.normalized, &run.limit)?)
    };
    println!("walks\tdefined\tks");
    println!("{}\t{}\t{}", a.walks, run.normalized.len(), ks.map_or("".into(), |d| format!("{d:.4}")));

    let mut m = RunManifest::new("orw", a.seed, argv);
    m.param("p", a.p)
        .param("q", a.q)
        .param("n", a.n)
        .param("walks", a.walks)
        .param("limit_draws", a.limit_draws);
    m.output(&file_name(&a.out), &header_line(table::ORW_HEADER));
    m.write(&manifest_path_for(&a.out))?;
    if a.check && !ks.is_some_and(|d| d < CHECK_KS_THRESHOLD) {
        eprintln!("check failed: KS distance is not below {CHECK_KS_THRESHOLD}");
        return Ok(Outcome::CheckFailed);
    }
    Ok(Outcome::Success)
}

fn figure1(a: &Figure1Args, argv: Vec<String>) -> Result<Outcome> {
    let config = MonteCarloConfig {
        params: ObmParams::new(a.sigma_plus, a.sigma_minus)?,
        horizon: a.horizon,
        n_steps: a.n,
        paths: a.paths,
        limit_draws: a.limit_draws,
        seed: a.seed,
        estimator: EstimatorChoice::Both,
    };
    create_dir(&a.out)?;
    let run = run_montecarlo(&config, worker_count()?)?;
    let panels = figure_panels(&run)?;

    let mut m = RunManifest::new("figure1", a.seed, argv);
    m.param("sigma_plus", a.sigma_plus)
        .param("sigma_minus", a.sigma_minus)
        .param("t", a.horizon)
        .param("n", a.n)
        .param("paths", a.paths)
        .param("limit_draws", a.limit_draws);
    for p in &panels {
        let file = format!("panel_{}.csv", p.name);
        write_csv(&a.out.join(&file), table::PANEL_HEADER, p.rows())?;
        let first = p.first.name();
        let meaning = if p.versus_limit {
            format!("empirical={first},limit={first}_limit")
        } else {
            format!("empirical={first},limit={}", first.replace('M', "S"))
        };
        m.param(&format!("panel_{}", p.name), meaning);
        m.output(&file, &header_line(table::PANEL_HEADER));
    }
    m.write(&a.out.join("manifest.txt"))?;
    Ok(Outcome::Success)
}

fn replay(a: &ReplayArgs) -> Result<Outcome> {
    let manifest = RunManifest::read(&a.manifest)?;
    let mut argv = manifest.argv.clone();
    if argv.first().is_some_and(|c| c == "replay") {
        return Err(Error::invalid("a manifest cannot replay a replay"));
    }
    if let Some(out) = &a.out {
        let new = out.display().to_string();
        let mut replaced = false;
        for i in 0..argv.len() {
            if argv[i] == "--out" || argv[i] == "--out-dir" {
                if let Some(v) = argv.get_mut(i + 1) {
                    *v = new.clone();
                    replaced = true;
                }
            } else if let Some(flag) = ["--out=", "--out-dir="].iter().find(|f| argv[i].starts_with(**f)) {
                argv[i] = format!("{flag}{new}");
                replaced = true;
            }
        }
        if !replaced {
            return Err(Error::invalid("recorded command has no output flag to replace"));
        }
    }
    execute_args(&argv)
}
