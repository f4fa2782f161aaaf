//! Simulation oracle for the analytical laws: Poisson field realizations,
//! empirical distributions and divergence diagnostics.

pub mod divergence;
pub mod empirical;
pub mod engine;
pub mod field;
pub mod histogram;

pub use divergence::js_divergence;
pub use empirical::{normalize_samples, EmpiricalDistribution, Normalization};
pub use engine::{replication_rng, run_replications, sum_replications};
pub use field::{realize_metrics, FieldRealization, FieldSampler, PrefixMetrics, RealizationMetrics};
pub use histogram::{independence_diagnostic, Histogram2D, IndependenceDiagnostic};
