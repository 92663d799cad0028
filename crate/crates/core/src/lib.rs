//! Zero-forcing interference cancellation in Poisson ad hoc networks.
//!
//! The crate has two halves. A Monte Carlo simulator samples networks,
//! builds receive beamformers and counts outages ([`montecarlo`]). An
//! analytic engine evaluates outage bounds, asymptotic capacity brackets and
//! training-length formulas by closed form and quadrature ([`analytic`]).

pub mod analytic;
pub mod beamforming;
pub mod error;
pub mod io;
pub mod linalg;
pub mod montecarlo;
pub mod network;
pub mod params;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use analytic::{BoundReport, DerivedConstants};
pub use beamforming::{Beamformer, CsiEstimate};
pub use montecarlo::{Mode, OutageCurve, OutageEstimate, TcResult};
pub use network::{CancellationSplit, NetworkRealization};
pub use params::SystemParams;
pub use rng::RngStream;
