//! Command-line front end: parameter sweeps, bound tables and the
//! training-length calculator. Tables are written as CSV; each file output
//! gets a JSON run manifest next to it.

pub mod commands;
pub mod config;

use clap::{Args, Parser, Subcommand};
use commands::{CommandError, Result};
use config::{parse_modes, RunConfig};
use serde::Serialize;
use sicnet_core::io::{write_csv, CsvRow};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "sicnet", version, about = "Outage and transmission capacity with zero-forcing interference cancellation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulated outage with analytic bounds over a density grid.
    PoutSweep(Common),
    /// Transmission capacity by density inversion over (eps, L, M).
    TcSweep(Common),
    /// Analytic outage bounds and their components over a density grid.
    Bounds(Common),
    /// Monte Carlo outage estimates over a density grid.
    Simulate(Common),
    /// Per-interferer listing of simulated realizations.
    Dump(Common),
    /// Training length meeting outage and rate-loss budgets.
    TrainLen(TrainLenArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Flat key = value configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    #[arg(long, value_name = "N")]
    pub trials: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
    /// Output CSV path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// One or more of perfect, explicit, shortcut (comma-separated).
    #[arg(long, value_name = "MODE")]
    pub mode: Option<String>,
    /// Extra `key=value` overrides, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Args, Debug, Clone)]
pub struct TrainLenArgs {
    /// Number of canceled interferers L.
    #[arg(value_name = "L")]
    pub n_cancel: usize,
    /// Outage-loss budget.
    #[arg(value_name = "THETA_P")]
    pub theta_p: f64,
    /// Rate-loss budget in bit/s/Hz.
    #[arg(value_name = "THETA_B")]
    pub theta_b: f64,
    /// Target outage used in the capacity-loss bound.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// SIR threshold used in the capacity-loss bound.
    #[arg(long, default_value_t = 3.0)]
    pub theta: f64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Builds the run configuration: defaults, then the file, then flags.
pub fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CommandError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    for kv in &common.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CommandError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(out) = &common.out {
        cfg.output_path = Some(out.clone());
    }
    if let Some(mode) = &common.mode {
        cfg.modes = parse_modes(mode)?;
    }
    if common.threads == Some(0) {
        return Err(CommandError::Config("--threads must be positive".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    git_describe: String,
    params: Option<sicnet_core::SystemParams>,
    config: &'a std::collections::BTreeMap<String, String>,
    seed: u64,
    trials: u64,
    modes: Vec<&'static str>,
    threads: usize,
    rows: usize,
    wall_time_s: f64,
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

/// `out.csv` gets `out.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn write_table<R: CsvRow>(rows: &[R], out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CommandError::Io(format!("cannot create {}: {e}", path.display())))?;
            write_csv(std::io::BufWriter::new(file), rows)?;
        }
        None => write_csv(std::io::stdout().lock(), rows)?,
    }
    Ok(())
}

fn run_table<R, F>(name: &str, common: &Common, work: F) -> Result<()>
where
    R: CsvRow,
    F: FnOnce(&RunConfig) -> Result<Vec<R>> + Send,
    R: Send,
{
    let cfg = load_config(common)?;
    let threads = common.threads.unwrap_or_else(rayon::current_num_threads);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CommandError::Config(format!("cannot start {threads} threads: {e}")))?;
    let start = Instant::now();
    let rows = pool.install(|| work(&cfg))?;
    let wall = start.elapsed().as_secs_f64();
    let out = cfg.output_path.as_deref();
    write_table(&rows, out)?;
    if let Some(out) = out {
        let manifest = Manifest {
            command: name,
            version: env!("CARGO_PKG_VERSION"),
            git_describe: git_describe(),
            params: commands::manifest_params(&cfg),
            config: &cfg.raw,
            seed: cfg.master_seed,
            trials: cfg.trials,
            modes: cfg.modes.iter().map(|m| m.as_str()).collect(),
            threads,
            rows: rows.len(),
            wall_time_s: wall,
        };
        let path = manifest_path(out);
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CommandError::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n")
            .map_err(|e| CommandError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run_train_len(args: &TrainLenArgs) -> Result<()> {
    let report = commands::train_len_report(args.n_cancel, args.theta_p, args.theta_b, args.eps, args.theta)?;
    match &args.out {
        Some(path) => std::fs::write(path, report)
            .map_err(|e| CommandError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(report.as_bytes())
            .map_err(|e| CommandError::Io(e.to_string()))?,
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::PoutSweep(c) => run_table("pout-sweep", c, commands::pout_sweep),
        Command::TcSweep(c) => run_table("tc-sweep", c, commands::tc_sweep),
        Command::Bounds(c) => run_table("bounds", c, commands::bounds),
        Command::Simulate(c) => run_table("simulate", c, commands::simulate),
        Command::Dump(c) => run_table("dump", c, commands::dump),
        Command::TrainLen(a) => run_train_len(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code:
/// 0 on success, 2 for a configuration error, 3 for a numerical failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("sicnet: {e}");
            e.exit_code()
        }
    }
}
