//! Thin wrappers over `statrs` special functions plus the Gaussian helpers
//! the distribution code leans on.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

pub use statrs::function::erf::{erf, erfc, erfc_inv};
pub use statrs::function::gamma::{gamma, ln_gamma};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934;

/// Standard normal CDF.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival function, accurate far into the upper tail.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

pub fn norm_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// z such that `norm_sf(z) == p`.
pub fn norm_isf(p: f64) -> f64 {
    SQRT_2 * erfc_inv(2.0 * p)
}

/// Lognormal law of parameters `(mu, sigma)` on the natural-log scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormal {
    pub mu: f64,
    pub sigma: f64,
}

impl LogNormal {
    pub fn new(mu: f64, sigma: f64) -> Self {
        Self { mu, sigma }
    }

    fn standardize(&self, x: f64) -> f64 {
        (x.ln() - self.mu) / self.sigma
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        norm_cdf(self.standardize(x))
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        norm_sf(self.standardize(x))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        norm_pdf(self.standardize(x)) / (x * self.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_tails() {
        assert_relative_eq!(norm_cdf(0.0), 0.5, max_relative = 1e-15);
        // Q(10) from tables
        assert_relative_eq!(norm_sf(10.0), 7.619_853_024_160_527e-24, max_relative = 1e-10);
        assert_relative_eq!(norm_isf(norm_sf(7.5)), 7.5, max_relative = 1e-9);
    }

    #[test]
    fn gamma_third() {
        assert_relative_eq!(gamma(1.0 / 3.0), 2.678_938_534_707_747_6, max_relative = 1e-12);
    }
}
