use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MEAN_NODE_COUNT: f64 = 200.0;

/// Scalar model parameters.
///
/// `lambda` is the density of active transmitters after any random access
/// thinning. Transmit power and the link distance are both fixed to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Antennas per receiver, N.
    pub n_antennas: usize,
    /// Interferers canceled per receiver, L.
    pub n_cancel: usize,
    /// Path-loss exponent α.
    pub alpha: f64,
    /// Linear SIR threshold θ.
    pub theta: f64,
    /// Transmitter density λ.
    pub lambda: f64,
    /// Training sequence length M, when imperfect CSI is modeled.
    pub train_len: Option<usize>,
    /// Expected number of interferers in the simulation disk.
    pub mean_node_count: f64,
}

impl SystemParams {
    pub fn new(n_antennas: usize, n_cancel: usize, alpha: f64, theta: f64, lambda: f64) -> Result<Self> {
        let p = Self {
            n_antennas,
            n_cancel,
            alpha,
            theta,
            lambda,
            train_len: None,
            mean_node_count: DEFAULT_MEAN_NODE_COUNT,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n_antennas < 1 {
            return bad("n_antennas must be at least 1".into());
        }
        if self.n_cancel + 1 > self.n_antennas {
            return bad(format!(
                "n_cancel = {} exceeds n_antennas − 1 = {}",
                self.n_cancel,
                self.n_antennas - 1
            ));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return bad(format!("alpha must be a finite value > 2, got {}", self.alpha));
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return bad(format!("theta must be positive, got {}", self.theta));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.mean_node_count > 0.0) || !self.mean_node_count.is_finite() {
            return bad(format!("mean_node_count must be positive, got {}", self.mean_node_count));
        }
        if let Some(m) = self.train_len {
            if m < 1 {
                return bad("train_len must be positive".into());
            }
            if m < self.n_cancel {
                return bad(format!("train_len = {m} is shorter than n_cancel = {}", self.n_cancel));
            }
        }
        Ok(())
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }

    pub fn with_train_len(&self, m: usize) -> Self {
        Self {
            train_len: Some(m),
            ..self.clone()
        }
    }

    pub fn with_mean_node_count(&self, count: f64) -> Self {
        Self {
            mean_node_count: count,
            ..self.clone()
        }
    }

    /// Array gain N − L.
    pub fn array_gain(&self) -> usize {
        self.n_antennas - self.n_cancel
    }

    /// Radius of the simulation disk holding `mean_node_count` nodes on average.
    pub fn disk_radius(&self) -> f64 {
        (self.mean_node_count / (std::f64::consts::PI * self.lambda)).sqrt()
    }
}
