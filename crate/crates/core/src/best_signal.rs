//! Best signal quality `Y_n = M_n / (1 + I - M_n)` over `n` scanned sites:
//! tail approximation treating `M_n` and the interference as independent, and
//! the expected throughput `W E log2(1 + Y_n)`.

use std::f64::consts::LN_2;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::extremes::MaxStrengthModel;
use crate::interference::{NetworkField, StableLaw};
use crate::montecarlo::engine::{run_replications, sum_replications};
use crate::montecarlo::field::FieldSampler;
use crate::numeric::{integrate, integrate_pieces, Hermite, Tolerance};
use crate::propagation::{RingGeometry, SignalStrength};
use crate::real::Real;

/// Quadrature settings for the tail and throughput integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub tol: Tolerance,
    /// The outer integral stops where `F_{M_n}(u) > 1 - outer_cutoff`.
    pub outer_cutoff: f64,
    /// The inner frequency integral stops where `exp(-delta w^alpha)` drops
    /// below this.
    pub inner_envelope: f64,
    /// Inner integrals whose top frequency exceeds this are taken from the
    /// tabulated interference law instead of direct oscillatory quadrature.
    pub direct_frequency_cap: f64,
    /// Nodes of the throughput kernel table.
    pub kernel_nodes: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: Tolerance::new(1e-12, 1e-8),
            outer_cutoff: 1e-8,
            inner_envelope: 1e-10,
            direct_frequency_cap: 32.0,
            kernel_nodes: 800,
        }
    }
}

/// Maximum strength over `n` sites together with the interference law.
#[derive(Debug, Clone)]
pub struct BestSignalModel {
    pub max_model: MaxStrengthModel,
    pub stable: StableLaw,
}

/// Whether the ring is expected to hold comfortably more than `n` sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingCapacity {
    pub expected_sites: f64,
    pub n: usize,
    /// Expected count is at least `2n`.
    pub holds: bool,
}

pub fn ring_capacity(lambda: f64, geometry: &RingGeometry, n: usize) -> RingCapacity {
    let expected_sites = lambda * geometry.area();
    RingCapacity { expected_sites, n, holds: expected_sites >= 2.0 * n as f64 }
}

/// Upper end of the interference window on which `Y_n >= gamma` given `M_n = u`.
fn window_top(u: f64, gamma: f64) -> f64 {
    u + (u - gamma) / gamma
}

impl BestSignalModel {
    pub fn new(max_model: MaxStrengthModel, stable: StableLaw) -> Result<Self> {
        let alpha = max_model.signal.params.alpha();
        if (alpha - stable.params.alpha).abs() > 1e-12 {
            return Err(domain(
                "BestSignalModel",
                format!("alpha {} of the interference law differs from 2/beta = {alpha}", stable.params.alpha),
            ));
        }
        Ok(Self { max_model, stable })
    }

    pub fn n(&self) -> usize {
        self.max_model.n
    }

    /// Inner frequency integral by direct oscillatory quadrature.
    pub fn inner_direct(&self, u: f64, gamma: f64, cfg: &QuadConfig) -> Result<f64> {
        if u <= gamma {
            return Ok(0.0);
        }
        self.stable
            .window_direct_with(u, window_top(u, gamma), cfg.inner_envelope, cfg.tol)
    }

    /// Inner integral through the tabulated law.
    pub fn inner_tabulated(&self, u: f64, gamma: f64) -> Result<f64> {
        if u <= gamma {
            return Ok(0.0);
        }
        let top = window_top(u, gamma);
        if top.is_infinite() {
            return self.stable.sf(u);
        }
        self.stable.window(u, top)
    }

    pub fn inner(&self, u: f64, gamma: f64, cfg: &QuadConfig) -> Result<f64> {
        if window_top(u, gamma) <= cfg.direct_frequency_cap {
            self.inner_direct(u, gamma, cfg)
        } else {
            self.inner_tabulated(u, gamma)
        }
    }

    /// Break points in ln u for integrals against the density of `M_n`,
    /// clipped to start at `from`.
    fn outer_points(&self, from: f64, cfg: &QuadConfig) -> Result<Option<Vec<f64>>> {
        let m = &self.max_model;
        let top = m.quantile(1.0 - cfg.outer_cutoff)?;
        if from >= top {
            return Ok(None);
        }
        let mut pts = vec![from.ln()];
        for &p in &[1e-12, 1e-6, 1e-3, 0.02, 0.1, 0.3, 0.5, 0.7, 0.9, 0.98, 0.999, 1.0 - 1e-5] {
            let t = m.quantile(p)?.ln();
            if t > *pts.last().unwrap() {
                pts.push(t);
            }
        }
        if top.ln() > *pts.last().unwrap() {
            pts.push(top.ln());
        }
        Ok(Some(pts))
    }

    /// `P(Y_n >= gamma)` under the independence approximation, clamped to
    /// `[0, 1]`.
    pub fn best_quality_tail(&self, gamma: f64, cfg: &QuadConfig) -> Result<f64> {
        if !(gamma > 0.0) {
            return Err(domain("best_quality_tail", format!("gamma = {gamma} must be positive")));
        }
        let Some(points) = self.outer_points(gamma, cfg)? else {
            return Ok(0.0);
        };
        let mut failure = None;
        let est = integrate_pieces(
            |t: f64| {
                let u = t.exp();
                let eval = || -> Result<f64> { Ok(self.max_model.pdf(u)? * u * self.inner(u, gamma, cfg)?) };
                eval().unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    0.0
                })
            },
            &points,
            cfg.tol,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        if est.value < -1e-3 {
            warn!("tail estimate {} at gamma = {gamma} clamped to 0", est.value);
        }
        Ok(est.value.clamp(0.0, 1.0))
    }

    /// Expected throughput in bits/s from the tail integral over gamma, the
    /// direct (and slow) route; see [`ThroughputModel`] for the fast one.
    pub fn expected_throughput_from_tail(&self, bandwidth: f64, cfg: &QuadConfig) -> Result<f64> {
        let signal = &self.max_model.signal;
        let lo = signal.quantile(1e-12)?.ln() - 5.0;
        let hi = self.max_model.quantile(1.0 - cfg.outer_cutoff)?.ln();
        let mut failure = None;
        let est = integrate(
            |t: f64| {
                let g = t.exp();
                match self.best_quality_tail(g, cfg) {
                    Ok(v) => v * g / (1.0 + g),
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                }
            },
            lo,
            hi,
            Tolerance::new(1e-9, 1e-6),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(bandwidth * est.value / LN_2)
    }
}

/// Expected throughput for every scan size from one kernel table.
///
/// Exchanging the order of integration gives
/// `E log(1 + Y_n) = int f_{M_n}(u) k(u) du` with
/// `k(u) = int_0^u P(u <= I <= u + (u - g)/g) / (1 + g) dg`, which does not
/// depend on `n`.
#[derive(Debug, Clone)]
pub struct ThroughputModel {
    pub signal: SignalStrength,
    pub stable: StableLaw,
    pub cfg: QuadConfig,
    ln_u_lo: f64,
    ln_u_hi: f64,
    kernel: Hermite,
}

impl ThroughputModel {
    pub fn new(signal: SignalStrength, stable: StableLaw, cfg: QuadConfig) -> Result<Self> {
        let ln_u_lo = signal.quantile(1e-12)?.ln();
        let ln_u_hi = signal.isf(1e-14)?.ln();
        let nodes = cfg.kernel_nodes.max(16);
        let xs: Vec<f64> = (0..nodes)
            .map(|k| ln_u_lo + (ln_u_hi - ln_u_lo) * k as f64 / (nodes - 1) as f64)
            .collect();
        let ys: Vec<f64> = xs
            .par_iter()
            .map(|&t| Ok(kernel_direct(&stable, t.exp())?.ln()))
            .collect::<Result<_>>()?;
        let kernel = Hermite::monotone(xs, ys);
        Ok(Self { signal, stable, cfg, ln_u_lo, ln_u_hi, kernel })
    }

    /// Kernel `k(u)` from the table, computed directly outside it.
    pub fn kernel(&self, u: f64) -> Result<f64> {
        let t = u.ln();
        if t < self.ln_u_lo || t > self.ln_u_hi {
            return kernel_direct(&self.stable, u);
        }
        Ok(self.kernel.eval(t).exp())
    }

    /// `E log2(1 + Y_n)`, i.e. throughput per unit bandwidth.
    pub fn spectral_efficiency(&self, n: usize) -> Result<f64> {
        let model = BestSignalModel::new(MaxStrengthModel::new(n, self.signal)?, self.stable.clone())?;
        let from = model.max_model.quantile(1e-12)?;
        let points = model
            .outer_points(from, &self.cfg)?
            .expect("lower quantile lies below upper cutoff");
        let mut failure = None;
        let est = integrate_pieces(
            |t: f64| {
                let u = t.exp();
                let eval = || -> Result<f64> { Ok(model.max_model.pdf(u)? * u * self.kernel(u)?) };
                eval().unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    0.0
                })
            },
            &points,
            self.cfg.tol,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(est.value / LN_2)
    }

    /// Expected throughput `E xi_n` in bits/s.
    pub fn expected_throughput(&self, n: usize, bandwidth: f64) -> Result<f64> {
        if n == 0 {
            return Err(domain("expected_throughput", "n must be at least 1"));
        }
        Ok(bandwidth * self.spectral_efficiency(n)?)
    }

    /// Throughput for each scan size in `n_values`.
    pub fn curve(&self, n_values: &[usize], bandwidth: f64) -> Result<ThroughputCurve> {
        let xi = n_values
            .par_iter()
            .map(|&n| self.expected_throughput(n, bandwidth))
            .collect::<Result<Vec<_>>>()?;
        ThroughputCurve::new(n_values.to_vec(), xi, bandwidth)
    }
}

/// `k(u)` by quadrature over gamma on the tabulated interference law.
fn kernel_direct(stable: &StableLaw, u: f64) -> Result<f64> {
    let mut failure = None;
    let mut window = |g: f64| -> f64 {
        if g <= 0.0 {
            return stable.sf(u).unwrap_or(0.0);
        }
        if g >= u {
            return 0.0;
        }
        let top = window_top(u, g);
        let w = if top.is_finite() { stable.window(u, top) } else { stable.sf(u) };
        w.unwrap_or_else(|e| {
            failure.get_or_insert(e);
            0.0
        })
    };
    let tol = Tolerance::new(1e-14, 1e-10);
    let split = u.min(1.0);
    let mut total = integrate(|g: f64| window(g) / (1.0 + g), 0.0, split, tol)?.value;
    if u > 1.0 {
        total += integrate(
            |t: f64| {
                let g = t.exp();
                window(g) * g / (1.0 + g)
            },
            0.0,
            u.ln(),
            tol,
        )?
        .value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(total)
}

/// Expected throughput against scan size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThroughputCurve<T = f64> {
    pub n_values: Vec<usize>,
    /// bits/s
    pub xi_values: Vec<T>,
    pub bandwidth: T,
}

impl<T: Real> ThroughputCurve<T> {
    pub fn new(n_values: Vec<usize>, xi_values: Vec<T>, bandwidth: T) -> Result<Self> {
        if n_values.len() != xi_values.len() || n_values.is_empty() {
            return Err(domain("ThroughputCurve", "n and xi series must be nonempty and of equal length"));
        }
        if n_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("ThroughputCurve", "n values must be strictly increasing"));
        }
        if xi_values.iter().any(|&x| x < T::zero() || !x.is_finite()) {
            return Err(domain("ThroughputCurve", "throughput values must be finite and nonnegative"));
        }
        Ok(Self { n_values, xi_values, bandwidth })
    }

    pub fn xi(&self, n: usize) -> Option<T> {
        self.n_values.binary_search(&n).ok().map(|k| self.xi_values[k])
    }

    /// Copy with every throughput multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            n_values: self.n_values.clone(),
            xi_values: self.xi_values.iter().map(|&x| x * k).collect(),
            bandwidth: self.bandwidth * k,
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.xi_values.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Simulated `P(M_n / (1 + I - M_n) >= gamma)` over full field realizations,
/// with its standard error.
pub fn best_quality_tail_mc_exact(
    gamma: f64,
    n: usize,
    field: &NetworkField,
    geometry: &RingGeometry,
    reps: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if reps == 0 {
        return Err(domain("best_quality_tail_mc_exact", "reps must be at least 1"));
    }
    let sampler = FieldSampler::new(*field, *geometry)?;
    let hits = run_replications(seed, reps, |rng, _| {
        let prefix = sampler.sample_prefix(rng, n)?;
        Ok(prefix.y(n) >= gamma)
    })?;
    let p = hits.iter().filter(|&&h| h).count() as f64 / reps as f64;
    Ok((p, (p * (1.0 - p) / reps as f64).sqrt()))
}

/// Simulated throughput curve with per-point standard errors (bits/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedThroughput {
    pub curve: ThroughputCurve,
    pub std_err: Vec<f64>,
    pub reps: u64,
}

/// `W E log2(1 + Y_n)` for `n = 1..=n_max`, sharing each realization across
/// all scan sizes through its running maxima.
pub fn throughput_curve_mc(
    field: &NetworkField,
    geometry: &RingGeometry,
    n_max: usize,
    bandwidth: f64,
    reps: u64,
    seed: u64,
) -> Result<SimulatedThroughput> {
    if reps < 2 || n_max == 0 {
        return Err(domain("throughput_curve_mc", "need n_max >= 1 and at least two replications"));
    }
    let sampler = FieldSampler::new(*field, *geometry)?;
    let sums = sum_replications(seed, reps, 2 * n_max, |rng, _, acc| {
        let prefix = sampler.sample_prefix(rng, n_max)?;
        for n in 1..=n_max {
            let v = prefix.y(n).ln_1p() / LN_2;
            acc[2 * (n - 1)] += v;
            acc[2 * (n - 1) + 1] += v * v;
        }
        Ok(())
    })?;
    let r = reps as f64;
    let mut xi = Vec::with_capacity(n_max);
    let mut se = Vec::with_capacity(n_max);
    for n in 0..n_max {
        let mean = sums[2 * n] / r;
        let var = ((sums[2 * n + 1] / r - mean * mean) * r / (r - 1.0)).max(0.0);
        xi.push(bandwidth * mean);
        se.push(bandwidth * (var / r).sqrt());
    }
    Ok(SimulatedThroughput { curve: ThroughputCurve::new((1..=n_max).collect(), xi, bandwidth)?, std_err: se, reps })
}
