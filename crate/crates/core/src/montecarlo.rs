//! Monte Carlo outage estimation and density inversion.
//!
//! Trial `i` of a run with seed `s` draws everything from
//! `RngStream::new(s, i)`: first the network, then any training symbols or
//! estimation noise. Results therefore do not depend on how trials are
//! spread over threads.
//!
//! For a fixed stream the interferer count and the normalized positions do
//! not depend on `λ`; distances scale as `λ^{-1/2}`, so every
//! interference term scales as `λ^{α/2}` and `SIR(λ) = SIR(λ₀)(λ₀/λ)^{α/2}`
//! in every mode. [`OutageCurve`] stores one batch of trials in that
//! normalized form and answers outage queries at any density exactly as a
//! fresh run with the same seed would.

use crate::analytic::{capacity, invert_bound, kappas, Bound};
use crate::beamforming::{estimate_csi_with, zf_mrc, zf_mrc_into, Beamformer, TrainingMatrix};
use crate::error::{Error, Result};
use crate::linalg::{dot_norm_sqr, OrthoBasis};
use crate::network::{resample_network, split_interferers_into, CancellationSplit, ChannelSynthesis, NetworkRealization};
use crate::params::SystemParams;
use crate::rng::{sample_gamma_integer_shape, RngStream};
use crate::stats::binomial_ci_halfwidth;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Degenerate channel draws are resampled at most this many times per trial.
const MAX_RESAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Perfect,
    ImperfectExplicit,
    ImperfectShortcut,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Perfect => "perfect",
            Mode::ImperfectExplicit => "imperfect_explicit",
            Mode::ImperfectShortcut => "imperfect_shortcut",
        }
    }

    pub fn is_imperfect(self) -> bool {
        self != Mode::Perfect
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" => Ok(Mode::Perfect),
            "explicit" | "imperfect_explicit" => Ok(Mode::ImperfectExplicit),
            "shortcut" | "imperfect_shortcut" => Ok(Mode::ImperfectShortcut),
            other => Err(Error::InvalidParams(format!(
                "unknown mode {other:?}; expected perfect, explicit or shortcut"
            ))),
        }
    }
}

/// How estimation error enters an imperfect-CSI SIR.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CsiMode {
    /// Simulate training and build the beamformer on the estimates.
    Explicit,
    /// Beamform on true channels and inflate the interference by `1 + ζ/M`.
    Shortcut,
}

/// Everything one trial measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialSample {
    pub sir: f64,
    /// Signal power after beamforming, `W`.
    pub signal: f64,
    /// Interference from all uncanceled interferers, `I_Σ`.
    pub interference: f64,
    /// Residual estimation noise variance, zero with perfect CSI.
    pub residual: f64,
    /// Interference from the primary interferer, `I_P`.
    pub primary: Option<f64>,
    /// Pre-cancellation power of the primary interferer, `J_P`.
    pub j_p: Option<f64>,
    pub interferers: usize,
}

impl TrialSample {
    /// Interference from the secondary interferers, `I_S = I_Σ − I_P`.
    pub fn secondary(&self) -> f64 {
        (self.interference - self.primary.unwrap_or(0.0)).max(0.0)
    }
}

fn ratio(signal: f64, denom: f64) -> f64 {
    if denom > 0.0 {
        signal / denom
    } else {
        f64::INFINITY
    }
}

fn uncanceled_interference(real: &NetworkRealization, split: &CancellationSplit, v0: &[Complex64]) -> (f64, Option<f64>) {
    let mut total = 0.0;
    let mut primary = None;
    for i in 0..real.len() {
        if split.is_canceled(i) {
            continue;
        }
        let it = dot_norm_sqr(v0, real.channel(i));
        if Some(i) == split.primary_index {
            primary = Some(it);
        }
        total += it;
    }
    (total, primary)
}

fn canceled_channels<'a>(real: &'a NetworkRealization, split: &'a CancellationSplit) -> impl Iterator<Item = &'a [Complex64]> + 'a {
    split.canceled.iter().map(move |&t| real.channel(t))
}

/// SIR with perfect channel knowledge.
pub fn sir_perfect(real: &NetworkRealization, split: &CancellationSplit) -> Result<f64> {
    let nulled: Vec<&[Complex64]> = canceled_channels(real, split).collect();
    let bf = zf_mrc(&real.own_channel, &nulled)?;
    let (interference, _) = uncanceled_interference(real, split, &bf.v0);
    Ok(ratio(bf.gain(&real.own_channel), interference))
}

/// SIR when the canceled channels are learned from `train_len` training
/// symbols.
pub fn sir_imperfect(
    real: &NetworkRealization,
    split: &CancellationSplit,
    train_len: usize,
    mode: CsiMode,
    rng: &mut RngStream,
) -> Result<f64> {
    let l = real.params.n_cancel;
    if train_len < l.max(1) {
        return Err(Error::InvalidParams(format!(
            "training length {train_len} is shorter than L = {l}"
        )));
    }
    let mut scratch = Scratch::new(real.params.n_antennas);
    let q = if mode == CsiMode::Explicit {
        Some(TrainingMatrix::dft(split.canceled.len(), train_len)?)
    } else {
        None
    };
    let mode = match mode {
        CsiMode::Explicit => Mode::ImperfectExplicit,
        CsiMode::Shortcut => Mode::ImperfectShortcut,
    };
    Ok(evaluate(real, split, mode, train_len, q.as_ref(), &mut scratch, rng)?.sir)
}

struct Scratch {
    basis: OrthoBasis,
    v0: Vec<Complex64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            basis: OrthoBasis::new(n),
            v0: Vec::with_capacity(n),
        }
    }
}

fn evaluate(
    real: &NetworkRealization,
    split: &CancellationSplit,
    mode: Mode,
    train_len: usize,
    q: Option<&TrainingMatrix>,
    scratch: &mut Scratch,
    rng: &mut RngStream,
) -> Result<TrialSample> {
    let h0 = &real.own_channel;
    let trained = split.canceled.len();
    let (signal, interference, residual, primary) = match mode {
        Mode::ImperfectExplicit if trained > 0 => {
            let fresh;
            let q = match q {
                Some(q) if q.rows() == trained => q,
                _ => {
                    fresh = TrainingMatrix::dft(trained, train_len)?;
                    &fresh
                }
            };
            let est = estimate_csi_with(real, split, q, rng)?;
            let bf: &Beamformer = &est.beamformer;
            let (interference, primary) = uncanceled_interference(real, split, &bf.v0);
            (bf.gain(h0), interference, est.residual_var, primary)
        }
        _ => {
            zf_mrc_into(&mut scratch.basis, h0, canceled_channels(real, split), &mut scratch.v0)?;
            let signal = dot_norm_sqr(&scratch.v0, h0);
            let (interference, primary) = uncanceled_interference(real, split, &scratch.v0);
            let residual = if mode == Mode::ImperfectShortcut && trained > 0 {
                sample_gamma_integer_shape(trained as u32, rng) / train_len as f64 * interference
            } else {
                0.0
            };
            (signal, interference, residual, primary)
        }
    };
    Ok(TrialSample {
        sir: ratio(signal, interference + residual),
        signal,
        interference,
        residual,
        primary,
        j_p: split.j_p,
        interferers: real.len(),
    })
}

/// Reusable per-thread state for running trials.
pub struct TrialRunner {
    mode: Mode,
    train_len: usize,
    synthesis: ChannelSynthesis,
    training: Option<TrainingMatrix>,
    real: NetworkRealization,
    split: CancellationSplit,
    scratch: Scratch,
}

impl TrialRunner {
    pub fn new(params: &SystemParams, mode: Mode) -> Result<Self> {
        params.validate()?;
        let train_len = if mode.is_imperfect() {
            params.train_len.ok_or_else(|| {
                Error::InvalidParams(format!("mode {mode} needs a training length"))
            })?
        } else {
            0
        };
        let training = if mode == Mode::ImperfectExplicit && params.n_cancel > 0 {
            Some(TrainingMatrix::dft(params.n_cancel, train_len)?)
        } else {
            None
        };
        Ok(Self {
            mode,
            train_len,
            synthesis: ChannelSynthesis::Direct,
            training,
            real: NetworkRealization::empty(params),
            split: CancellationSplit::default(),
            scratch: Scratch::new(params.n_antennas),
        })
    }

    pub fn with_synthesis(mut self, synthesis: ChannelSynthesis) -> Self {
        self.synthesis = synthesis;
        self
    }

    /// The realization and split of the last trial run.
    pub fn last(&self) -> (&NetworkRealization, &CancellationSplit) {
        (&self.real, &self.split)
    }

    pub fn run(&mut self, master_seed: u64, trial_index: u64) -> Result<TrialSample> {
        let mut rng = RngStream::new(master_seed, trial_index);
        let mut last_err = None;
        for _ in 0..MAX_RESAMPLES {
            resample_network(&mut self.real, self.synthesis, &mut rng);
            split_interferers_into(&self.real, &mut self.split);
            match evaluate(
                &self.real,
                &self.split,
                self.mode,
                self.train_len,
                self.training.as_ref(),
                &mut self.scratch,
                &mut rng,
            ) {
                Ok(s) => return Ok(s),
                Err(e @ Error::Degenerate(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("loop ran at least once"))
    }
}

/// Runs trials `0..trials` in parallel and returns them in index order.
pub fn simulate_trials(params: &SystemParams, mode: Mode, trials: u64, master_seed: u64) -> Result<Vec<TrialSample>> {
    TrialRunner::new(params, mode)?;
    (0..trials)
        .into_par_iter()
        .map_init(
            || TrialRunner::new(params, mode).expect("validated above"),
            |runner, i| runner.run(master_seed, i),
        )
        .collect()
}

/// Monte Carlo outage probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub trials: u64,
    pub ci_halfwidth: f64,
    pub mode: Mode,
    pub outages: u64,
    /// Trials with no primary interferer (fewer than `L + 1` interferers).
    pub missing_primary: u64,
}

impl OutageEstimate {
    fn from_counts(outages: u64, trials: u64, missing_primary: u64, mode: Mode) -> Self {
        let p_hat = outages as f64 / trials as f64;
        Self {
            p_hat,
            trials,
            ci_halfwidth: binomial_ci_halfwidth(p_hat, trials),
            mode,
            outages,
            missing_primary,
        }
    }
}

/// Fraction of `trials` independent networks with `SIR < θ`.
pub fn estimate_outage(params: &SystemParams, trials: u64, mode: Mode, master_seed: u64) -> Result<OutageEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be positive".into()));
    }
    TrialRunner::new(params, mode)?;
    let theta = params.theta;
    let (outages, missing) = (0..trials)
        .into_par_iter()
        .map_init(
            || TrialRunner::new(params, mode).expect("validated above"),
            |runner, i| runner.run(master_seed, i).map(|s| (u64::from(s.sir < theta), u64::from(s.j_p.is_none()))),
        )
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(OutageEstimate::from_counts(outages, trials, missing, mode))
}

/// Outage probability as a function of density from one batch of trials.
#[derive(Clone, Debug)]
pub struct OutageCurve {
    params: SystemParams,
    mode: Mode,
    master_seed: u64,
    /// `SIR·λ^{α/2}` per trial, sorted ascending; infinite when no
    /// interference remains.
    normalized: Vec<f64>,
    missing_primary: u64,
}

impl OutageCurve {
    /// Simulates `trials` networks at `params.lambda`.
    pub fn simulate(params: &SystemParams, trials: u64, mode: Mode, master_seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParams("trials must be positive".into()));
        }
        let samples = simulate_trials(params, mode, trials, master_seed)?;
        let scale = params.lambda.powf(0.5 * params.alpha);
        let missing_primary = samples.iter().filter(|s| s.j_p.is_none()).count() as u64;
        let mut normalized: Vec<f64> = samples.iter().map(|s| s.sir * scale).collect();
        normalized.sort_by(f64::total_cmp);
        Ok(Self {
            params: params.clone(),
            mode,
            master_seed,
            normalized,
            missing_primary,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn trials(&self) -> u64 {
        self.normalized.len() as u64
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Number of trials with `SIR < θ` at density `lambda`.
    pub fn outages(&self, lambda: f64, theta: f64) -> u64 {
        let cut = theta * lambda.powf(0.5 * self.params.alpha);
        self.normalized.partition_point(|&x| x < cut) as u64
    }

    pub fn p_hat(&self, lambda: f64) -> f64 {
        self.outages(lambda, self.params.theta) as f64 / self.normalized.len() as f64
    }

    pub fn estimate(&self, lambda: f64) -> OutageEstimate {
        self.estimate_with_threshold(lambda, self.params.theta)
    }

    pub fn estimate_with_threshold(&self, lambda: f64, theta: f64) -> OutageEstimate {
        OutageEstimate::from_counts(self.outages(lambda, theta), self.trials(), self.missing_primary, self.mode)
    }
}

/// Density achieving a target outage and the resulting capacity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TcResult {
    pub epsilon: f64,
    pub lambda_star: f64,
    /// `(1 − ε) log₂(1 + θ) λ*`.
    pub capacity: f64,
    /// Final bracket, with `p̂(lambda_lo) < ε < p̂(lambda_hi)`.
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub p_hat: f64,
    pub ci_halfwidth: f64,
    pub trials: u64,
    pub iterations: usize,
}

/// Starting density for the search: the small-outage asymptote when its
/// constant exists, otherwise the density where the analytic lower bound
/// reaches `eps`.
pub fn initial_density_guess(params: &SystemParams, eps: f64) -> Result<f64> {
    let l1 = params.n_cancel as f64 + 1.0;
    match kappas(params).kappa1 {
        Some(k1) => Ok((eps / k1).powf(1.0 / l1)),
        None => invert_bound(eps, params, Bound::Lower),
    }
}

/// Bisection on `ln λ` over a curve. Stops once the confidence interval
/// at the midpoint covers `eps` or the bracket is narrower than `tol`
/// (relative).
pub fn invert_curve(curve: &OutageCurve, eps: f64, tol: f64, guess: f64) -> Result<TcResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(guess > 0.0) || !guess.is_finite() {
        return Err(Error::InvalidParams(format!("initial density must be positive, got {guess}")));
    }
    let n = curve.trials();
    let (mut lo, mut hi) = (guess, guess);
    let mut expansions = 0;
    while curve.p_hat(lo) >= eps {
        lo /= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Search(format!(
                "p̂ stays ≥ {eps} down to λ = {lo:e} ({n} trials)"
            )));
        }
    }
    while curve.p_hat(hi) <= eps {
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Search(format!(
                "p̂ stays ≤ {eps} up to λ = {hi:e} ({n} trials); too few trials for this target?"
            )));
        }
    }
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mid = (lo * hi).sqrt();
        let p = curve.p_hat(mid);
        let ci = binomial_ci_halfwidth(p, n);
        let done = (p - eps).abs() <= ci || hi / lo - 1.0 < tol || iterations >= 200;
        if done {
            let theta = curve.params().theta;
            return Ok(TcResult {
                epsilon: eps,
                lambda_star: mid,
                capacity: capacity(eps, theta, mid),
                lambda_lo: lo,
                lambda_hi: hi,
                p_hat: p,
                ci_halfwidth: ci,
                trials: n,
                iterations,
            });
        }
        if p < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Density at which the simulated outage equals `eps`, and the capacity
/// there. `params.lambda` is ignored.
///
/// Every evaluation uses the same `trials` streams, so the search runs on an
/// [`OutageCurve`] simulated once.
pub fn invert_density(params: &SystemParams, eps: f64, trials: u64, tol: f64, mode: Mode, master_seed: u64) -> Result<TcResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParams(format!("eps must lie in (0, 1), got {eps}")));
    }
    let guess = initial_density_guess(params, eps)?;
    let curve = OutageCurve::simulate(&params.with_lambda(guess), trials, mode, master_seed)?;
    invert_curve(&curve, eps, tol, guess)
}
