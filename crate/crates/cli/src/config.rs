//! Flat `key = value` run configuration.
//!
//! Lines starting with `#` are comments. Unknown keys are rejected. Grids are
//! comma-separated lists or `logspace(lo, hi, n)`.

use sicnet_core::{Mode, SystemParams};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

pub const KEYS: &[&str] = &[
    "N",
    "L",
    "alpha",
    "theta",
    "lambda",
    "M",
    "mean_node_count",
    "lambda_grid",
    "eps_grid",
    "L_grid",
    "M_list",
    "trials",
    "master_seed",
    "output_path",
    "mode",
    "tol",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_antennas: usize,
    pub n_cancel: usize,
    pub alpha: f64,
    pub theta: f64,
    pub lambda: f64,
    pub train_len: Option<usize>,
    pub mean_node_count: f64,
    pub lambda_grid: Option<Vec<f64>>,
    pub eps_grid: Option<Vec<f64>>,
    pub l_grid: Option<Vec<usize>>,
    pub m_list: Option<Vec<usize>>,
    pub trials: u64,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub modes: Vec<Mode>,
    /// Relative width at which density bisection stops.
    pub tol: f64,
    /// Raw `key = value` pairs as given, for the run manifest.
    pub raw: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_antennas: 3,
            n_cancel: 1,
            alpha: 4.0,
            theta: 3.0,
            lambda: 0.01,
            train_len: None,
            mean_node_count: sicnet_core::params::DEFAULT_MEAN_NODE_COUNT,
            lambda_grid: None,
            eps_grid: None,
            l_grid: None,
            m_list: None,
            trials: 100_000,
            master_seed: 0,
            output_path: None,
            modes: vec![Mode::Perfect],
            tol: 1e-3,
            raw: BTreeMap::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}")))
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

pub fn parse_real_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    if let Some(inner) = v.strip_prefix("logspace(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return err(format!("{key}: logspace takes (lo, hi, n)"));
        }
        let lo: f64 = parse_num(key, parts[0])?;
        let hi: f64 = parse_num(key, parts[1])?;
        let n: usize = parse_num(key, parts[2])?;
        if !(lo > 0.0 && hi >= lo) || n == 0 {
            return err(format!("{key}: logspace needs 0 < lo ≤ hi and n ≥ 1"));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        return Ok((0..n)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect());
    }
    split_list(v).map(|s| parse_num(key, s)).collect()
}

pub fn parse_int_grid(key: &str, v: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in split_list(v) {
        if let Some((a, b)) = item.split_once("..=") {
            let (a, b): (usize, usize) = (parse_num(key, a)?, parse_num(key, b)?);
            out.extend(a..=b);
        } else {
            out.push(parse_num(key, item)?);
        }
    }
    Ok(out)
}

pub fn parse_modes(v: &str) -> Result<Vec<Mode>> {
    let modes: Vec<Mode> = split_list(v)
        .map(|s| s.parse::<Mode>().map_err(|e| ConfigError(format!("mode: {e}"))))
        .collect::<Result<_>>()?;
    if modes.is_empty() {
        return err("mode: empty");
    }
    Ok(modes)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", lineno + 1));
            };
            let value = value.split('#').next().unwrap_or("");
            cfg.set(key.trim(), value.trim())
                .map_err(|e| ConfigError(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "N" => self.n_antennas = parse_num(key, value)?,
            "L" => self.n_cancel = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "theta" => self.theta = parse_num(key, value)?,
            "lambda" => self.lambda = parse_num(key, value)?,
            "M" => self.train_len = Some(parse_num(key, value)?),
            "mean_node_count" => self.mean_node_count = parse_num(key, value)?,
            "lambda_grid" => self.lambda_grid = Some(parse_real_grid(key, value)?),
            "eps_grid" => self.eps_grid = Some(parse_real_grid(key, value)?),
            "L_grid" => self.l_grid = Some(parse_int_grid(key, value)?),
            "M_list" => self.m_list = Some(parse_int_grid(key, value)?),
            "trials" => self.trials = parse_num(key, value)?,
            "master_seed" => self.master_seed = parse_num(key, value)?,
            "output_path" => self.output_path = Some(PathBuf::from(value)),
            "mode" => self.modes = parse_modes(value)?,
            "tol" => self.tol = parse_num(key, value)?,
            other => return err(format!("unknown key {other:?}; known keys: {}", KEYS.join(", "))),
        }
        self.raw.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Base parameters from the scalar keys.
    pub fn base_params(&self) -> Result<SystemParams> {
        let mut p = SystemParams::new(self.n_antennas, self.n_cancel, self.alpha, self.theta, self.lambda)
            .map_err(|e| ConfigError(e.to_string()))?
            .with_mean_node_count(self.mean_node_count);
        if let Some(m) = self.train_len {
            p = p.with_train_len(m);
        }
        p.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(p)
    }

    /// Parameters for `L` canceled interferers, keeping the array gain
    /// `N − L` of the base parameters.
    pub fn params_for(&self, l: usize, m: Option<usize>) -> Result<SystemParams> {
        let base = self.base_params()?;
        let n = base.array_gain() + l;
        let mut p = SystemParams::new(n, l, base.alpha, base.theta, base.lambda)
            .map_err(|e| ConfigError(e.to_string()))?
            .with_mean_node_count(base.mean_node_count);
        p.train_len = m;
        p.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(p)
    }

    pub fn l_values(&self, default: &[usize]) -> Result<Vec<usize>> {
        let v = match &self.l_grid {
            Some(g) => g.clone(),
            None if self.raw.contains_key("L") => vec![self.n_cancel],
            None => default.to_vec(),
        };
        if v.is_empty() {
            return err("L_grid is empty");
        }
        Ok(v)
    }

    pub fn lambda_values(&self, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.lambda_grid.clone().unwrap_or_else(|| default.to_vec());
        if v.is_empty() {
            return err("lambda_grid is empty");
        }
        if let Some(bad) = v.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
            return err(format!("lambda_grid: density must be positive, got {bad}"));
        }
        Ok(v)
    }

    pub fn eps_values(&self, default: &[f64]) -> Result<Vec<f64>> {
        let v = self.eps_grid.clone().unwrap_or_else(|| default.to_vec());
        if v.is_empty() {
            return err("eps_grid is empty");
        }
        if let Some(bad) = v.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
            return err(format!("eps_grid: target outage must lie in (0, 1), got {bad}"));
        }
        Ok(v)
    }

    /// Training lengths for imperfect modes.
    pub fn m_values(&self, default: &[usize]) -> Result<Vec<usize>> {
        let v = match (&self.m_list, self.train_len) {
            (Some(list), _) => list.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => default.to_vec(),
        };
        if v.is_empty() {
            return err("M_list is empty");
        }
        Ok(v)
    }

    /// Checks everything that does not depend on the command.
    pub fn validate(&self) -> Result<()> {
        self.base_params()?;
        if self.trials == 0 {
            return err("trials must be positive");
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return err(format!("tol must lie in (0, 1), got {}", self.tol));
        }
        Ok(())
    }
}
