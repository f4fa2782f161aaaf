//! Poisson field realizations and the per-realization signal metrics.
//!
//! Sites inside the scan ring are simulated one by one. Beyond the ring, only
//! sites whose received power exceeds `weak_threshold` are drawn explicitly;
//! the many faint contributions are summed into one Gaussian term with the
//! exact mean and variance of the truncated compound Poisson sum.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interference::NetworkField;
use crate::numeric::special::{norm_cdf, norm_isf, norm_sf};
use crate::numeric::{integrate, Tolerance};
use crate::propagation::{sample_ring_distance, RingGeometry};

/// Resampling budget when the ring holds fewer sites than requested.
pub const MAX_RESAMPLES: usize = 100;

/// One draw of the network around the mobile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRealization {
    /// Ring sites first, then the explicitly drawn sites beyond the ring.
    pub site_distances: Vec<f64>,
    pub shadow_factors: Vec<f64>,
    /// Indices of the scanned sites, all within the ring.
    pub scan_subset: Vec<usize>,
    /// Number of leading entries that lie in the ring.
    pub ring_count: usize,
    /// Aggregate power of the faint far sites not listed individually.
    pub faint_power: f64,
}

/// Signal metrics of one realization (noise-normalized).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationMetrics {
    pub m_n: f64,
    pub i_n: f64,
    pub i_total: f64,
    pub y_n: f64,
    /// Strongest scanned site equals the site of best SINR, and the closed
    /// form for the best SINR matches the direct maximum.
    pub lemma_identity: bool,
}

#[derive(Debug, Clone)]
struct FarField {
    /// Cumulative expected count of strong far sites at `radii`.
    cumulative: Vec<f64>,
    radii: Vec<f64>,
    faint_mean: f64,
    faint_sd: f64,
}

/// Sampler for the network field around the mobile.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    pub field: NetworkField,
    pub geometry: RingGeometry,
    pub weak_threshold: f64,
    far: FarField,
}

impl FieldSampler {
    pub fn new(field: NetworkField, geometry: RingGeometry) -> Result<Self> {
        Self::with_threshold(field, geometry, 1e-3)
    }

    pub fn with_threshold(field: NetworkField, geometry: RingGeometry, weak_threshold: f64) -> Result<Self> {
        if (field.r_min - geometry.r_min).abs() > 1e-12 * geometry.r_min {
            return Err(domain("FieldSampler", "field and ring disagree on r_min"));
        }
        if field.r_inf < geometry.r_b {
            return Err(domain("FieldSampler", "r_inf must not be below r_b"));
        }
        if !(weak_threshold > 0.0) {
            return Err(domain("FieldSampler", "weak_threshold must be positive"));
        }
        let far = FarField::build(&field, geometry.r_b, weak_threshold)?;
        Ok(Self { field, geometry, weak_threshold, far })
    }

    /// Expected number of sites in the scan ring.
    pub fn ring_mean(&self) -> f64 {
        self.field.lambda * self.geometry.area()
    }

    /// Expected number of explicitly drawn far sites.
    pub fn strong_far_mean(&self) -> f64 {
        *self.far.cumulative.last().unwrap_or(&0.0)
    }

    /// Mean and standard deviation of the aggregated faint far power.
    pub fn faint_moments(&self) -> (f64, f64) {
        (self.far.faint_mean, self.far.faint_sd)
    }

    fn shadow<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        (self.field.params.sigma_x * z).exp()
    }

    fn power(&self, d: f64, x: f64) -> f64 {
        self.field.params.a_norm * d.powf(-self.field.params.beta) * x
    }

    fn draw_ring<R: Rng + ?Sized>(&self, rng: &mut R, dist: &mut Vec<f64>, shadow: &mut Vec<f64>) -> usize {
        let count = Poisson::new(self.ring_mean()).expect("positive mean").sample(rng) as usize;
        for _ in 0..count {
            let u: f64 = rng.random();
            dist.push(sample_ring_distance(u, &self.geometry).expect("uniform in [0, 1)"));
            shadow.push(self.shadow(rng));
        }
        count
    }

    fn draw_far<R: Rng + ?Sized>(&self, rng: &mut R, dist: &mut Vec<f64>, shadow: &mut Vec<f64>) -> f64 {
        let mean = self.strong_far_mean();
        if mean > 0.0 {
            let count = Poisson::new(mean).expect("positive mean").sample(rng) as usize;
            let p = &self.field.params;
            for _ in 0..count {
                let r = self.far.sample_radius(rng.random::<f64>() * mean);
                let z0 = self.far_z0(r);
                // Shadow conditioned on pushing the power above the threshold.
                let u: f64 = rng.random();
                let z = norm_isf((1.0 - u) * norm_sf(z0));
                dist.push(r);
                shadow.push((p.sigma_x * z).exp());
            }
        }
        let z: f64 = StandardNormal.sample(rng);
        (self.far.faint_mean + self.far.faint_sd * z).max(0.0)
    }

    fn far_z0(&self, r: f64) -> f64 {
        let p = &self.field.params;
        (self.weak_threshold * r.powf(p.beta) / p.a_norm).ln() / p.sigma_x
    }

    /// Draw a realization with `n` scanned sites, resampling up to
    /// [`MAX_RESAMPLES`] times when the ring has fewer than `n` sites.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<FieldRealization> {
        let mut found = 0;
        for _ in 0..=MAX_RESAMPLES {
            let mut dist = Vec::new();
            let mut shadow = Vec::new();
            let ring = self.draw_ring(rng, &mut dist, &mut shadow);
            let faint = self.draw_far(rng, &mut dist, &mut shadow);
            if ring < n {
                found = ring;
                continue;
            }
            let mut idx: Vec<usize> = (0..ring).collect();
            for k in 0..n {
                let j = rng.random_range(k..ring);
                idx.swap(k, j);
            }
            idx.truncate(n);
            return Ok(FieldRealization {
                site_distances: dist,
                shadow_factors: shadow,
                scan_subset: idx,
                ring_count: ring,
                faint_power: faint,
            });
        }
        Err(Error::InsufficientSites { requested: n, found })
    }

    /// Prefix metrics for scan sizes 1..=n_max from one realization: the
    /// scanned sites are a uniformly random ordered draw from the ring, so the
    /// first k of them form a uniform k-subset.
    pub fn sample_prefix<R: Rng + ?Sized>(&self, rng: &mut R, n_max: usize) -> Result<PrefixMetrics> {
        let r = self.sample(rng, n_max)?;
        let powers: Vec<f64> = r
            .site_distances
            .iter()
            .zip(&r.shadow_factors)
            .map(|(&d, &x)| self.power(d, x))
            .collect();
        let i_total = powers.iter().sum::<f64>() + r.faint_power;
        let mut m = Vec::with_capacity(n_max);
        let mut best = 0.0f64;
        for &k in &r.scan_subset {
            best = best.max(powers[k]);
            m.push(best);
        }
        Ok(PrefixMetrics { m, i_total })
    }

    /// Metrics of a realization.
    pub fn realize_metrics(&self, r: &FieldRealization) -> RealizationMetrics {
        realize_metrics(r, &self.field.params)
    }
}

/// Running maxima of the scanned powers and the total interference.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixMetrics {
    /// `m[k-1]` is the maximum over the first k scanned sites.
    pub m: Vec<f64>,
    pub i_total: f64,
}

impl PrefixMetrics {
    /// Best SINR over the first `n` scanned sites.
    pub fn y(&self, n: usize) -> f64 {
        let m = self.m[n - 1];
        m / (1.0 + self.i_total - m)
    }
}

/// Metrics of a realization given the propagation constants.
pub fn realize_metrics(r: &FieldRealization, params: &crate::propagation::PropagationParams) -> RealizationMetrics {
    let power = |k: usize| params.a_norm * r.site_distances[k].powf(-params.beta) * r.shadow_factors[k];
    let i_total: f64 = (0..r.site_distances.len()).map(power).sum::<f64>() + r.faint_power;
    let mut m_n = f64::NEG_INFINITY;
    let mut i_n = 0.0;
    let mut by_power = usize::MAX;
    let mut y_direct = f64::NEG_INFINITY;
    let mut by_sinr = usize::MAX;
    for &k in &r.scan_subset {
        let p = power(k);
        i_n += p;
        if p > m_n {
            m_n = p;
            by_power = k;
        }
        let sinr = p / (1.0 + i_total - p);
        if sinr > y_direct {
            y_direct = sinr;
            by_sinr = k;
        }
    }
    let y_n = m_n / (1.0 + i_total - m_n);
    let lemma_identity = by_power == by_sinr && (y_n - y_direct).abs() <= 1e-12 * y_n.abs();
    RealizationMetrics { m_n, i_n, i_total, y_n, lemma_identity }
}

impl FarField {
    fn build(field: &NetworkField, r_b: f64, eps: f64) -> Result<Self> {
        let p = field.params;
        let s = p.sigma_x;
        let two_pi_lambda = 2.0 * std::f64::consts::PI * field.lambda;
        let z0 = |r: f64| (eps * r.powf(p.beta) / p.a_norm).ln() / s;
        let nodes = 4000;
        let (lo, hi) = (r_b.ln(), field.r_inf.ln());
        if hi <= lo {
            return Ok(Self { cumulative: vec![0.0], radii: vec![r_b], faint_mean: 0.0, faint_sd: 0.0 });
        }
        let radii: Vec<f64> = (0..nodes)
            .map(|k| (lo + (hi - lo) * k as f64 / (nodes - 1) as f64).exp())
            .collect();
        let density = |r: f64| two_pi_lambda * r * r * norm_sf(z0(r));
        let tol = Tolerance::new(1e-14, 1e-10);
        let mut cumulative = Vec::with_capacity(nodes);
        cumulative.push(0.0);
        for w in radii.windows(2) {
            let piece = integrate(|t: f64| density(t.exp()), w[0].ln(), w[1].ln(), tol)?.value;
            cumulative.push(cumulative.last().unwrap() + piece);
        }
        let mean_x = (0.5 * s * s).exp();
        let mean_x2 = (2.0 * s * s).exp();
        let faint_mean = integrate(
            |t: f64| {
                let r = t.exp();
                let scale = p.a_norm * r.powf(-p.beta);
                two_pi_lambda * r * r * scale * mean_x * norm_cdf(z0(r) - s)
            },
            lo,
            hi,
            tol,
        )?
        .value;
        let faint_var = integrate(
            |t: f64| {
                let r = t.exp();
                let scale = p.a_norm * r.powf(-p.beta);
                two_pi_lambda * r * r * scale * scale * mean_x2 * norm_cdf(z0(r) - 2.0 * s)
            },
            lo,
            hi,
            tol,
        )?
        .value;
        Ok(Self { cumulative, radii, faint_mean, faint_sd: faint_var.sqrt() })
    }

    /// Radius at cumulative strong-site count `target`.
    fn sample_radius(&self, target: f64) -> f64 {
        let k = self.cumulative.partition_point(|&c| c < target).clamp(1, self.cumulative.len() - 1);
        let (c0, c1) = (self.cumulative[k - 1], self.cumulative[k]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        // Within a node the intensity is close to linear in r^2.
        (r0 * r0 + frac * (r1 * r1 - r0 * r0)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::engine::replication_rng;
    use crate::propagation::{derive_propagation_params, reference_radio};

    fn sampler() -> FieldSampler {
        let p = derive_propagation_params(&reference_radio()).unwrap();
        let field = NetworkField::new(1e-4, 2.0, 1e5, p).unwrap();
        FieldSampler::new(field, RingGeometry::new(2.0, 1000.0).unwrap()).unwrap()
    }

    #[test]
    fn realization_is_reproducible_and_in_bounds() {
        let s = sampler();
        let a = s.sample(&mut replication_rng(5, 0), 50).unwrap();
        let b = s.sample(&mut replication_rng(5, 0), 50).unwrap();
        assert_eq!(a, b);
        for (k, &d) in a.site_distances.iter().enumerate() {
            assert!(d >= 2.0 && d <= 1e5);
            if k < a.ring_count {
                assert!(d <= 1000.0);
            }
        }
        assert!(a.scan_subset.iter().all(|&k| k < a.ring_count));
        assert!(a.shadow_factors.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn single_site_metrics() {
        let s = sampler();
        let r = FieldRealization {
            site_distances: vec![2.0],
            shadow_factors: vec![1.0],
            scan_subset: vec![0],
            ring_count: 1,
            faint_power: 0.0,
        };
        let m = s.realize_metrics(&r);
        let expected = s.field.params.a_norm / 8.0;
        assert_eq!(m.m_n, expected);
        assert_eq!(m.i_n, expected);
        assert_eq!(m.y_n, expected);
        assert!(m.lemma_identity);
    }

    #[test]
    fn too_few_sites_is_reported() {
        let s = sampler();
        let err = s.sample(&mut replication_rng(1, 0), 10_000).unwrap_err();
        assert!(matches!(err, Error::InsufficientSites { requested: 10_000, .. }));
    }
}
