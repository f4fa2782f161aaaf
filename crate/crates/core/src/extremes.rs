//! Law of the maximum received power over `n` scanned sites: the exact
//! finite-n distribution and its Gumbel normalization.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::montecarlo::divergence::js_divergence;
use crate::propagation::SignalStrength;
use crate::real::Real;

/// Maximum of `n` i.i.d. ring powers.
#[derive(Debug, Clone, Copy)]
pub struct MaxStrengthModel {
    pub n: usize,
    pub signal: SignalStrength,
}

/// Location and scale sequence for the Gumbel limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelNormalization<T = f64> {
    pub c_n: T,
    pub d_n: T,
}

impl MaxStrengthModel {
    pub fn new(n: usize, signal: SignalStrength) -> Result<Self> {
        if n == 0 {
            return Err(domain("MaxStrengthModel", "n must be at least 1"));
        }
        Ok(Self { n, signal })
    }

    pub fn ln_cdf(&self, x: f64) -> Result<f64> {
        Ok(self.n as f64 * self.signal.ln_cdf(x)?)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Ok(self.ln_cdf(x)?.exp())
    }

    /// 1 - F_P^n without cancellation in the upper tail.
    pub fn sf(&self, x: f64) -> Result<f64> {
        Ok(-self.ln_cdf(x)?.exp_m1())
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        let f = self.signal.pdf(x)?;
        if f == 0.0 {
            return Ok(0.0);
        }
        let n = self.n as f64;
        let tail = (n - 1.0) * self.signal.ln_cdf(x)?;
        Ok(n * f * tail.exp())
    }

    /// x with F_{M_n}(x) = p.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("max_strength_quantile", format!("p = {p} outside (0, 1)")));
        }
        // F_P = p^{1/n}; work with its complement to keep precision for large n.
        let q = -(p.ln() / self.n as f64).exp_m1();
        self.signal.isf(q)
    }

    pub fn normalization(&self) -> Result<GumbelNormalization> {
        gumbel_constants(self.n, &self.signal)
    }

    /// Lower end of the normalized support, `-sqrt(2 ln n)/sigma_x`.
    pub fn support_floor(&self) -> f64 {
        -(2.0 * (self.n as f64).ln()).sqrt() / self.signal.params.sigma_x
    }

    /// CDF of `(M_n - d_n)/c_n`; exactly zero below the support floor.
    pub fn normalized_cdf(&self, z: f64) -> Result<f64> {
        let g = self.normalization()?;
        if z <= self.support_floor() {
            return Ok(0.0);
        }
        let x = g.c_n * z + g.d_n;
        if x <= 0.0 {
            return Ok(0.0);
        }
        self.cdf(x)
    }

    /// Sup-norm distance between the normalized law and the Gumbel law on
    /// `zs`, ignoring grid points below the support floor.
    pub fn sup_distance_to_gumbel(&self, zs: &[f64]) -> Result<f64> {
        let floor = self.support_floor();
        let mut worst = 0.0f64;
        for &z in zs.iter().filter(|&&z| z >= floor) {
            worst = worst.max((self.normalized_cdf(z)? - gumbel_cdf(z)).abs());
        }
        Ok(worst)
    }

    /// Jensen-Shannon divergence between the normalized law and the Gumbel law,
    /// both binned on `edges` and renormalized to the binned range.
    pub fn js_to_gumbel(&self, edges: &[f64]) -> Result<f64> {
        let model: Vec<f64> = edges.iter().map(|&z| self.normalized_cdf(z)).collect::<Result<_>>()?;
        let limit: Vec<f64> = edges.iter().map(|&z| gumbel_cdf(z)).collect();
        js_divergence(&bin_masses(&model)?, &bin_masses(&limit)?)
    }
}

fn bin_masses(cdf: &[f64]) -> Result<Vec<f64>> {
    let masses: Vec<f64> = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    let total: f64 = masses.iter().sum();
    if !(total > 0.0) {
        return Err(domain("bin_masses", "no probability mass on the grid"));
    }
    Ok(masses.into_iter().map(|m| m / total).collect())
}

/// Gumbel constants from the tail-equivalence parameters.
pub fn gumbel_constants_from<T: Real>(n: usize, mu2: T, sigma_x: T, kappa: T) -> Result<GumbelNormalization<T>> {
    if n < 2 {
        return Err(domain("gumbel_constants", format!("n = {n}; need n >= 2 so that ln n > 0")));
    }
    let ln_n = T::lit(n as f64).ln();
    let root = (T::lit(2.0) * ln_n).sqrt();
    let d_n = (mu2 + sigma_x * (root + (kappa.ln() - ln_n.ln()) / root)).exp();
    Ok(GumbelNormalization { c_n: sigma_x / root * d_n, d_n })
}

pub fn gumbel_constants(n: usize, signal: &SignalStrength) -> Result<GumbelNormalization> {
    gumbel_constants_from(n, signal.consts.mu2, signal.params.sigma_x, signal.consts.kappa)
}

/// Standard Gumbel CDF `exp(-e^{-x})`.
pub fn gumbel_cdf<T: Real>(x: T) -> T {
    (-(-x).exp()).exp()
}

pub fn gumbel_pdf<T: Real>(x: T) -> T {
    (-x - (-x).exp()).exp()
}
