//! The work behind each subcommand, separated from argument handling.

use crate::config::{ConfigError, RunConfig};
use serde::Serialize;
use sicnet_core::analytic::{capacity_loss_bound, pout_lower, pout_upper, tc_asymptotic_eps, training_length};
use sicnet_core::io::{dump_rows, BoundRow, CsvRow, DumpRow, OutageRow};
use sicnet_core::montecarlo::{estimate_outage, initial_density_guess, invert_curve, TrialRunner};
use sicnet_core::{Mode, OutageCurve, SystemParams};

/// Failure classes, mapped to exit codes by the binary.
#[derive(Debug)]
pub enum CommandError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Numerical(_) => 3,
            CommandError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Config(m) => write!(f, "configuration error: {m}"),
            CommandError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CommandError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::Config(e.0)
    }
}

impl From<sicnet_core::Error> for CommandError {
    fn from(e: sicnet_core::Error) -> Self {
        use sicnet_core::Error as E;
        match e {
            E::InvalidParams(_) => CommandError::Config(e.to_string()),
            E::Io(m) => CommandError::Io(m),
            _ => CommandError::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CommandError>;

pub const DEFAULT_SWEEP_L: &[usize] = &[1, 3];
pub const DEFAULT_TC_L: &[usize] = &[0, 1, 2, 3, 4, 5, 6, 7];
pub const DEFAULT_EPS: &[f64] = &[1e-1, 1e-2, 1e-3];
pub const DEFAULT_M: &[usize] = &[3, 5, 11];

/// Twelve densities from 1e-3 to 0.3, log-spaced.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..12).map(|i| 1e-3 * 300f64.powf(i as f64 / 11.0)).collect()
}

/// `(mode, M)` pairs to simulate; perfect CSI has no training length.
fn mode_runs(cfg: &RunConfig, l: usize) -> Result<Vec<(Mode, Option<usize>)>> {
    let mut runs = Vec::new();
    for &mode in &cfg.modes {
        if mode.is_imperfect() {
            for m in cfg.m_values(DEFAULT_M)? {
                if m < l.max(1) {
                    return Err(CommandError::Config(format!("M = {m} is shorter than L = {l}")));
                }
                runs.push((mode, Some(m)));
            }
        } else {
            runs.push((mode, None));
        }
    }
    Ok(runs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoutRow {
    pub lambda: f64,
    pub mode: Mode,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub p_sim: f64,
    pub ci: f64,
    pub p_lower: f64,
    pub p_upper: f64,
}

impl CsvRow for PoutRow {
    const HEADER: &'static [&'static str] = &["lambda", "mode", "L", "M", "p_sim", "ci", "p_lower", "p_upper"];
}

/// Simulated outage and the analytic bounds on a density grid.
pub fn pout_sweep(cfg: &RunConfig) -> Result<Vec<PoutRow>> {
    cfg.validate()?;
    let grid = cfg.lambda_values(&default_lambda_grid())?;
    let ls = cfg.l_values(DEFAULT_SWEEP_L)?;
    let mut plan = Vec::new();
    for &l in &ls {
        let runs = mode_runs(cfg, l)?;
        for &(mode, m) in &runs {
            plan.push((cfg.params_for(l, m)?, mode));
        }
    }
    let mut rows = Vec::new();
    for (p, mode) in plan {
        // every density reuses the same trial streams
        let curve = OutageCurve::simulate(&p.with_lambda(grid[0]), cfg.trials, mode, cfg.master_seed)?;
        for &lambda in &grid {
            let est = curve.estimate(lambda);
            rows.push(PoutRow {
                lambda,
                mode,
                l: p.n_cancel,
                m: p.train_len,
                p_sim: est.p_hat,
                ci: est.ci_halfwidth,
                p_lower: pout_lower(lambda, &p)?,
                p_upper: pout_upper(lambda, &p)?.upper,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TcRow {
    pub eps: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub lambda_star: f64,
    pub capacity: f64,
    pub bracket_lo: Option<f64>,
    pub bracket_hi: Option<f64>,
}

impl CsvRow for TcRow {
    const HEADER: &'static [&'static str] = &["eps", "L", "M", "lambda_star", "capacity", "bracket_lo", "bracket_hi"];
}

/// Transmission capacity by density inversion, with the small-outage
/// brackets.
pub fn tc_sweep(cfg: &RunConfig) -> Result<Vec<TcRow>> {
    cfg.validate()?;
    let eps_grid = cfg.eps_values(DEFAULT_EPS)?;
    let ls = cfg.l_values(DEFAULT_TC_L)?;
    let mut plan = Vec::new();
    for &l in &ls {
        for (mode, m) in mode_runs(cfg, l)? {
            plan.push((cfg.params_for(l, m)?, mode));
        }
    }
    let mut rows = Vec::new();
    for (p, mode) in plan {
        // the normalized trial batch does not depend on the density it is
        // drawn at, so one curve serves every target
        let start = initial_density_guess(&p, eps_grid[0])?;
        let curve = OutageCurve::simulate(&p.with_lambda(start), cfg.trials, mode, cfg.master_seed)?;
        for &eps in &eps_grid {
            let guess = initial_density_guess(&p, eps)?;
            let r = invert_curve(&curve, eps, cfg.tol, guess)?;
            let br = tc_asymptotic_eps(eps, &p)?;
            rows.push(TcRow {
                eps,
                l: p.n_cancel,
                m: p.train_len,
                lambda_star: r.lambda_star,
                capacity: r.capacity,
                bracket_lo: br.lower,
                bracket_hi: br.upper,
            });
        }
    }
    Ok(rows)
}

/// Monte Carlo outage per density in the simulator's own schema.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<OutageRow>> {
    cfg.validate()?;
    let grid = cfg.lambda_values(&[cfg.lambda])?;
    let mut rows = Vec::new();
    for l in cfg.l_values(&[cfg.n_cancel])? {
        for (mode, m) in mode_runs(cfg, l)? {
            let p = cfg.params_for(l, m)?;
            for &lambda in &grid {
                let est = estimate_outage(&p.with_lambda(lambda), cfg.trials, mode, cfg.master_seed)?;
                rows.push(OutageRow::new(&p, lambda, &est, cfg.master_seed));
            }
        }
    }
    Ok(rows)
}

/// Analytic bounds per density.
pub fn bounds(cfg: &RunConfig) -> Result<Vec<BoundRow>> {
    cfg.validate()?;
    let grid = cfg.lambda_values(&default_lambda_grid())?;
    let p = cfg.base_params()?;
    grid.iter()
        .map(|&lambda| Ok(BoundRow::from(&pout_upper(lambda, &p)?)))
        .collect()
}

/// Per-interferer listing of the first `trials` realizations.
pub fn dump(cfg: &RunConfig) -> Result<Vec<DumpRow>> {
    cfg.validate()?;
    let p = cfg.base_params()?;
    let mode = cfg.modes[0];
    let mut runner = TrialRunner::new(&p, mode)?;
    let mut rows = Vec::new();
    for i in 0..cfg.trials {
        runner.run(cfg.master_seed, i)?;
        let (real, split) = runner.last();
        rows.extend(dump_rows(i, real, split));
    }
    Ok(rows)
}

/// Training length for the outage and rate budgets, as a text report.
pub fn train_len_report(n_cancel: usize, theta_p: f64, theta_b: f64, eps: f64, theta: f64) -> Result<String> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CommandError::Config(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(CommandError::Config(format!("theta must be positive, got {theta}")));
    }
    let plan = training_length(n_cancel, theta_p, theta_b)?;
    let loss = capacity_loss_bound(theta_p, theta_b, eps, theta);
    Ok(format!(
        "L = {n_cancel}\ntheta_p = {theta_p}\ntheta_b = {theta_b}\nM = {}\nomega = {}\nZ = {}\ncapacity_loss_bound = {loss} (eps = {eps}, theta = {theta})\n",
        plan.train_len, plan.omega, plan.z
    ))
}

/// Parameters echoed in the manifest.
pub fn manifest_params(cfg: &RunConfig) -> Option<SystemParams> {
    cfg.base_params().ok()
}
