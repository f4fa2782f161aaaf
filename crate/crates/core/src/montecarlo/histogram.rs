//! Two-dimensional histograms and the independence diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::montecarlo::divergence::js_divergence;
use crate::montecarlo::empirical::EmpiricalDistribution;

pub const MIN_BINS: usize = 20;
pub const MAX_BINS: usize = 60;
/// Below this many samples the diagnostic is flagged as unreliable.
pub const SPARSE_TOTAL: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram2D {
    pub edges_x: Vec<f64>,
    pub edges_y: Vec<f64>,
    /// Row-major, `counts[i * ny + j]` for x-bin i and y-bin j.
    pub counts: Vec<f64>,
}

/// Freedman-Diaconis bin count, clamped to [`MIN_BINS`, `MAX_BINS`].
pub fn freedman_diaconis_bins(e: &EmpiricalDistribution, lo: f64, hi: f64) -> usize {
    let iqr = e.quantile(0.75) - e.quantile(0.25);
    let n = e.len() as f64;
    if !(iqr > 0.0) || !(hi > lo) {
        return MIN_BINS;
    }
    let width = 2.0 * iqr / n.cbrt();
    (((hi - lo) / width).ceil() as usize).clamp(MIN_BINS, MAX_BINS)
}

fn range_of(e: &EmpiricalDistribution) -> (f64, f64) {
    let (lo, hi) = (e.quantile(0.001), e.quantile(0.999));
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

fn bin_of(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    let k = ((x - lo) / (hi - lo) * bins as f64).floor();
    (k.max(0.0) as usize).min(bins - 1)
}

impl Histogram2D {
    /// Histogram of paired samples on the 0.1%-99.9% quantile box; points
    /// outside the box are counted in the nearest edge bin. `bins` overrides
    /// the Freedman-Diaconis choice.
    pub fn from_samples(xs: &[f64], ys: &[f64], bins: Option<(usize, usize)>) -> Result<Self> {
        if xs.len() != ys.len() || xs.is_empty() {
            return Err(domain("Histogram2D", "need equally many nonempty x and y samples"));
        }
        let ex = EmpiricalDistribution::new(xs.to_vec())?;
        let ey = EmpiricalDistribution::new(ys.to_vec())?;
        let (xlo, xhi) = range_of(&ex);
        let (ylo, yhi) = range_of(&ey);
        let (nx, ny) = bins.unwrap_or_else(|| {
            (freedman_diaconis_bins(&ex, xlo, xhi), freedman_diaconis_bins(&ey, ylo, yhi))
        });
        if nx == 0 || ny == 0 {
            return Err(domain("Histogram2D", "bin counts must be positive"));
        }
        let mut counts = vec![0.0; nx * ny];
        for (&x, &y) in xs.iter().zip(ys) {
            counts[bin_of(x, xlo, xhi, nx) * ny + bin_of(y, ylo, yhi, ny)] += 1.0;
        }
        let edges = |lo: f64, hi: f64, n: usize| (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        Ok(Self { edges_x: edges(xlo, xhi, nx), edges_y: edges(ylo, yhi, ny), counts })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.edges_x.len() - 1, self.edges_y.len() - 1)
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Result of comparing a joint histogram with the product of its marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceDiagnostic {
    pub js: f64,
    pub total: f64,
    pub warning: Option<String>,
}

/// Jensen-Shannon divergence between the joint histogram and the product of
/// its marginals.
pub fn independence_diagnostic(h: &Histogram2D) -> Result<IndependenceDiagnostic> {
    let total = h.total();
    if !(total > 0.0) {
        return Err(domain("independence_diagnostic", "empty histogram"));
    }
    let (nx, ny) = h.shape();
    let joint: Vec<f64> = h.counts.iter().map(|c| c / total).collect();
    let mut px = vec![0.0; nx];
    let mut py = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            px[i] += joint[i * ny + j];
            py[j] += joint[i * ny + j];
        }
    }
    let product: Vec<f64> = (0..nx * ny).map(|k| px[k / ny] * py[k % ny]).collect();
    let js = js_divergence(&joint, &product)?;
    let warning = (total < SPARSE_TOTAL)
        .then(|| format!("only {total} samples; below {SPARSE_TOTAL} the estimate is biased upward"));
    Ok(IndependenceDiagnostic { js, total, warning })
}
