//! Empirical distributions and their comparison with analytical laws.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Sorted sample set with uniform weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

/// Affine normalizations applied to raw samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `(x - d_n)/c_n` for maxima.
    MaxGumbel { c_n: f64, d_n: f64 },
    /// `(x - n mu)/(sqrt(n) sigma)` for sums of `n` terms.
    SumClt { mu: f64, sigma: f64, n: usize },
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(domain("EmpiricalDistribution", "no samples"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(domain("EmpiricalDistribution", "NaN sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.len() as f64
    }

    /// Fraction of samples `>= x`.
    pub fn tail(&self, x: f64) -> f64 {
        (self.len() - self.sorted.partition_point(|&s| s < x)) as f64 / self.len() as f64
    }

    /// Sample quantile (lower order statistic).
    pub fn quantile(&self, p: f64) -> f64 {
        let k = ((p.clamp(0.0, 1.0) * self.len() as f64).ceil() as usize).clamp(1, self.len());
        self.sorted[k - 1]
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let n = self.len() as f64;
        self.sorted.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0)
    }

    /// One-sample Kolmogorov-Smirnov distance to a continuous CDF.
    pub fn ks_distance<F: FnMut(f64) -> f64>(&self, mut cdf: F) -> f64 {
        let n = self.len() as f64;
        let mut worst = 0.0f64;
        for (i, &x) in self.sorted.iter().enumerate() {
            let f = cdf(x);
            worst = worst.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
        }
        worst
    }

    pub fn normalized(&self, kind: Normalization) -> Result<Self> {
        normalize_samples(self.sorted.clone(), kind)
    }
}

/// Apply an affine normalization to raw samples.
pub fn normalize_samples(samples: Vec<f64>, kind: Normalization) -> Result<EmpiricalDistribution> {
    let (shift, scale) = match kind {
        Normalization::MaxGumbel { c_n, d_n } => {
            if !(c_n > 0.0) {
                return Err(domain("normalize_samples", "c_n must be positive"));
            }
            (d_n, c_n)
        }
        Normalization::SumClt { mu, sigma, n } => {
            if !(sigma > 0.0) || n == 0 {
                return Err(domain("normalize_samples", "sigma and n must be positive"));
            }
            (n as f64 * mu, (n as f64).sqrt() * sigma)
        }
    };
    EmpiricalDistribution::new(samples.into_iter().map(|x| (x - shift) / scale).collect())
}
