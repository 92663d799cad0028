//! CSV output.
//!
//! Every table starts with its header row, even when it has no data rows.

use crate::analytic::BoundReport;
use crate::error::Result;
use crate::montecarlo::{Mode, OutageEstimate};
use crate::network::{CancellationSplit, NetworkRealization};
use crate::params::SystemParams;
use serde::Serialize;
use std::io::Write;

/// A row type with a fixed column order.
pub trait CsvRow: Serialize {
    const HEADER: &'static [&'static str];
}

/// Writes a header followed by `rows`.
pub fn write_csv<W: Write, R: CsvRow>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(R::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One simulated grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutageRow {
    pub lambda: f64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci: f64,
    pub mode: Mode,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub theta: f64,
    /// Empty with perfect CSI.
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub seed: u64,
}

impl CsvRow for OutageRow {
    const HEADER: &'static [&'static str] = &["lambda", "trials", "p_hat", "ci", "mode", "L", "N", "alpha", "theta", "M", "seed"];
}

impl OutageRow {
    pub fn new(params: &SystemParams, lambda: f64, est: &OutageEstimate, seed: u64) -> Self {
        Self {
            lambda,
            trials: est.trials,
            p_hat: est.p_hat,
            ci: est.ci_halfwidth,
            mode: est.mode,
            l: params.n_cancel,
            n: params.n_antennas,
            alpha: params.alpha,
            theta: params.theta,
            m: if est.mode.is_imperfect() { params.train_len } else { None },
            seed,
        }
    }
}

/// Analytic bounds at one density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "Lambda1")]
    pub lambda1: f64,
    #[serde(rename = "Lambda2")]
    pub lambda2: f64,
    #[serde(rename = "Lambda3")]
    pub lambda3: f64,
    pub quad_err: f64,
}

impl CsvRow for BoundRow {
    const HEADER: &'static [&'static str] = &["lambda", "lower", "upper", "Lambda1", "Lambda2", "Lambda3", "quad_err"];
}

impl From<&BoundReport> for BoundRow {
    fn from(r: &BoundReport) -> Self {
        Self {
            lambda: r.lambda,
            lower: r.lower,
            upper: r.upper,
            lambda1: r.lambda1,
            lambda2: r.lambda2,
            lambda3: r.lambda3,
            quad_err: r.quadrature_error_estimate,
        }
    }
}

/// One interferer of one realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DumpRow {
    pub trial_id: u64,
    #[serde(rename = "r_T")]
    pub r: f64,
    #[serde(rename = "J_T")]
    pub j: f64,
    pub canceled_flag: u8,
    pub primary_flag: u8,
}

impl CsvRow for DumpRow {
    const HEADER: &'static [&'static str] = &["trial_id", "r_T", "J_T", "canceled_flag", "primary_flag"];
}

pub fn dump_rows(trial_id: u64, real: &NetworkRealization, split: &CancellationSplit) -> Vec<DumpRow> {
    (0..real.len())
        .map(|i| DumpRow {
            trial_id,
            r: real.distance(i),
            j: real.mark(i),
            canceled_flag: u8::from(split.is_canceled(i)),
            primary_flag: u8::from(split.primary_index == Some(i)),
        })
        .collect()
}
