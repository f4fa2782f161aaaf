use thiserror::Error;

/// Errors raised by the analytical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// A quadrature did not reach its tolerance within the subdivision budget.
    #[error(
        "quadrature did not converge on [{lower}, {upper}]: estimate {estimate:e}, \
         error {abs_err:e} after {evaluations} evaluations"
    )]
    Quadrature {
        lower: f64,
        upper: f64,
        estimate: f64,
        abs_err: f64,
        evaluations: usize,
    },

    /// The Poisson field produced fewer candidate sites in the ring than requested.
    #[error("insufficient sites in ring: requested {requested}, found {found}")]
    InsufficientSites { requested: usize, found: usize },

    /// A discrete distribution does not sum to one.
    #[error("distribution is not normalized (total mass {mass})")]
    Unnormalized { mass: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}
