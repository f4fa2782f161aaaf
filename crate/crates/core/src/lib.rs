//! Best signal quality in dense small-cell networks: the law of the maximum
//! SINR over a scanned set of cells and the choice of how many cells to scan.

pub mod best_signal;
pub mod error;
pub mod extremes;
pub mod interference;
pub mod montecarlo;
pub mod numeric;
pub mod propagation;
pub mod real;
pub mod scan;

pub use error::{Error, Result};
pub use real::Real;

/// Scalar used by the numerical (quadrature and Monte Carlo) code paths.
pub type Scalar = f64;

pub type Gumbel = extremes::GumbelNormalization<Scalar>;
pub type Curve = best_signal::ThroughputCurve<Scalar>;
pub type Timing = scan::ScanTiming<Scalar>;
pub type Plan = scan::ScanPlan<Scalar>;
