//! Radio signal model: picocell path loss, lognormal shadowing and the law of
//! the received power from a site placed uniformly in a ring around the mobile.
//!
//! All powers are normalized by the thermal noise power, so a received power
//! of 1 equals the noise floor.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::special::{norm_cdf, norm_sf};
use crate::numeric::{brent, integrate, LogNormal, Tolerance};
use crate::real::Real;

/// Boltzmann constant as used for the noise-floor computation (J/K).
pub const BOLTZMANN: f64 = 1.3804e-23;

/// Raw radio-planning inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Transmit power including antenna gain (dBm).
    pub tx_power_dbm: f64,
    /// Number of penetrated floors.
    pub floors: u32,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    /// Shadowing standard deviation (dB).
    pub sigma_db: f64,
    pub temperature_k: f64,
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(domain("RadioConfig", "bandwidth_hz must be positive"));
        }
        if !(self.sigma_db > 0.0) {
            return Err(domain("RadioConfig", "sigma_db must be positive"));
        }
        if !(self.temperature_k > 0.0) {
            return Err(domain("RadioConfig", "temperature_k must be positive"));
        }
        if !self.tx_power_dbm.is_finite() || !self.noise_figure_db.is_finite() {
            return Err(domain("RadioConfig", "power levels must be finite"));
        }
        Ok(())
    }

    /// Thermal noise power k_B T NF W, in mW.
    pub fn noise_power_mw(&self) -> f64 {
        BOLTZMANN * self.temperature_k * 10f64.powf(self.noise_figure_db / 10.0) * self.bandwidth_hz * 1e3
    }

    /// Transmit constant A of the power law `A d^{-beta}`, in mW.
    pub fn transmit_constant_mw(&self) -> f64 {
        let floor_loss = path_loss_db(1.0, self.floors).expect("unit distance is valid");
        10f64.powf((self.tx_power_dbm - floor_loss) / 10.0)
    }
}

/// Noise-normalized model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationParams {
    /// Transmit constant divided by the noise power.
    pub a_norm: f64,
    /// Path-loss exponent.
    pub beta: f64,
    /// Shadowing standard deviation on the natural-log scale.
    pub sigma_x: f64,
}

impl PropagationParams {
    pub fn new(a_norm: f64, beta: f64, sigma_x: f64) -> Result<Self> {
        if !(a_norm > 0.0 && a_norm.is_finite()) {
            return Err(domain("PropagationParams", format!("a_norm = {a_norm} must be positive")));
        }
        if !(beta > 2.0 && beta <= 4.0) {
            return Err(domain(
                "PropagationParams",
                format!("beta = {beta} outside (2, 4]; alpha = 2/beta must be below 1"),
            ));
        }
        if !(sigma_x > 0.0 && sigma_x.is_finite()) {
            return Err(domain("PropagationParams", format!("sigma_x = {sigma_x} must be positive")));
        }
        Ok(Self { a_norm, beta, sigma_x })
    }

    /// Exponent alpha = 2/beta of the interference law.
    pub fn alpha(&self) -> f64 {
        2.0 / self.beta
    }
}

/// Natural-log shadowing spread corresponding to a dB spread.
pub fn sigma_x_from_db<T: Real>(sigma_db: T) -> T {
    T::LN_10() / T::lit(10.0) * sigma_db
}

/// Ring from which scan candidates are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingGeometry {
    pub r_min: f64,
    pub r_b: f64,
}

impl RingGeometry {
    pub fn new(r_min: f64, r_b: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_b && r_b.is_finite()) {
            return Err(domain(
                "RingGeometry",
                format!("need 0 < r_min < r_b < inf, got r_min = {r_min}, r_b = {r_b}"),
            ));
        }
        Ok(Self { r_min, r_b })
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.r_b * self.r_b - self.r_min * self.r_min)
    }

    /// CDF of the distance of a site uniform in the ring.
    pub fn distance_cdf(&self, d: f64) -> f64 {
        let (lo, hi) = (self.r_min * self.r_min, self.r_b * self.r_b);
        ((d * d - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

/// Picocell path loss in dB at distance `d` metres through `floors` floors.
pub fn path_loss_db<T: Real>(d: T, floors: u32) -> Result<T> {
    if !(d > T::zero()) {
        return Err(domain("path_loss_db", format!("distance {d} must be positive")));
    }
    let f = T::lit(floors as f64);
    let exponent = (f + T::lit(2.0)) / (f + T::one()) - T::lit(0.46);
    let floor_term = if floors == 0 { T::zero() } else { T::lit(18.3) * f.powf(exponent) };
    Ok(T::lit(37.0) + T::lit(30.0) * d.log10() + floor_term)
}

/// Noise-normalized constants for the picocell model (beta fixed to 3 by the
/// 30 log10 d slope).
pub fn derive_propagation_params(cfg: &RadioConfig) -> Result<PropagationParams> {
    cfg.validate()?;
    let a_norm = cfg.transmit_constant_mw() / cfg.noise_power_mw();
    PropagationParams::new(a_norm, 3.0, sigma_x_from_db(cfg.sigma_db))
}

/// Inverse of the ring distance CDF.
pub fn sample_ring_distance(u: f64, g: &RingGeometry) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(domain("sample_ring_distance", format!("u = {u} outside [0, 1]")));
    }
    let lo = g.r_min * g.r_min;
    Ok((lo + u * (g.r_b * g.r_b - lo)).sqrt())
}

/// Constants of the closed-form power law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub kappa: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
    /// A R_B^{-beta}
    pub a_edge: f64,
    /// A R_min^{-beta}
    pub b_edge: f64,
    pub c_norm: f64,
    pub nu: f64,
}

impl DerivedConstants {
    pub fn new(p: &PropagationParams, g: &RingGeometry) -> Self {
        let (beta, s) = (p.beta, p.sigma_x);
        let a_edge = p.a_norm * g.r_b.powf(-beta);
        let b_edge = p.a_norm * g.r_min.powf(-beta);
        let ring = g.r_b * g.r_b - g.r_min * g.r_min;
        let shift = 2.0 * s * s / beta;
        let mu1 = a_edge.ln();
        let mu2 = b_edge.ln();
        Self {
            kappa: s / ((2.0 * std::f64::consts::PI).sqrt() * beta) * g.r_min * g.r_min / ring,
            mu1,
            mu2,
            mu3: mu1 + shift,
            mu4: mu2 + shift,
            a_edge,
            b_edge,
            c_norm: p.a_norm.powf(2.0 / beta) / ring,
            nu: 2.0 * s * s / (beta * beta),
        }
    }
}

/// Law of the received power `P = A d^{-beta} X` from a site uniform in the ring.
#[derive(Debug, Clone, Copy)]
pub struct SignalStrength {
    pub params: PropagationParams,
    pub geometry: RingGeometry,
    pub consts: DerivedConstants,
    g: [LogNormal; 4],
}

impl SignalStrength {
    pub fn new(params: PropagationParams, geometry: RingGeometry) -> Self {
        let consts = DerivedConstants::new(&params, &geometry);
        let s = params.sigma_x;
        let g = [
            LogNormal::new(consts.mu1, s),
            LogNormal::new(consts.mu2, s),
            LogNormal::new(consts.mu3, s),
            LogNormal::new(consts.mu4, s),
        ];
        Self { params, geometry, consts, g }
    }

    fn check(x: f64, what: &'static str) -> Result<()> {
        if x > 0.0 {
            Ok(())
        } else {
            Err(domain(what, format!("x = {x} must be positive")))
        }
    }

    fn median_guess(&self) -> f64 {
        // Median of the distance times the median shadow.
        let d = sample_ring_distance(0.5, &self.geometry).expect("0.5 in range");
        self.params.a_norm * d.powf(-self.params.beta)
    }

    fn weights(&self, x: f64) -> (f64, f64, f64) {
        let k = 2.0 / self.params.beta;
        let c = &self.consts;
        (c.a_edge.powf(-k), c.b_edge.powf(-k), (c.nu - k * x.ln()).exp())
    }

    fn cdf_direct(&self, x: f64) -> f64 {
        let (wa, wb, wx) = self.weights(x);
        let [g1, g2, g3, g4] = self.g;
        self.consts.c_norm * (wa * g1.cdf(x) - wb * g2.cdf(x) - wx * (g3.cdf(x) - g4.cdf(x)))
    }

    fn sf_direct(&self, x: f64) -> f64 {
        let (wa, wb, wx) = self.weights(x);
        let [g1, g2, g3, g4] = self.g;
        self.consts.c_norm * (wa * g1.sf(x) - wb * g2.sf(x) - wx * (g3.sf(x) - g4.sf(x)))
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check(x, "signal_strength_cdf")?;
        let v = if x < self.median_guess() {
            self.cdf_direct(x)
        } else {
            1.0 - self.sf_direct(x)
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Survival function, accurate deep into the upper tail.
    pub fn sf(&self, x: f64) -> Result<f64> {
        Self::check(x, "signal_strength_sf")?;
        let v = if x < self.median_guess() {
            1.0 - self.cdf_direct(x)
        } else {
            self.sf_direct(x)
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// ln F_P(x), computed without forming `1 - sf` above the median.
    pub fn ln_cdf(&self, x: f64) -> Result<f64> {
        Self::check(x, "signal_strength_cdf")?;
        if x < self.median_guess() {
            Ok(self.cdf_direct(x).max(0.0).ln())
        } else {
            Ok((-self.sf_direct(x).clamp(0.0, 1.0)).ln_1p())
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Self::check(x, "signal_strength_pdf")?;
        let k = 2.0 / self.params.beta;
        let z3 = (x.ln() - self.consts.mu3) / self.params.sigma_x;
        let z4 = (x.ln() - self.consts.mu4) / self.params.sigma_x;
        // G3 - G4 written as Q4 - Q3 above mu4 to keep relative precision.
        let gap = if z4 > 0.0 { norm_sf(z4) - norm_sf(z3) } else { norm_cdf(z3) - norm_cdf(z4) };
        let v = 2.0 * self.consts.c_norm / self.params.beta * (self.consts.nu - (k + 1.0) * x.ln()).exp() * gap;
        Ok(v.max(0.0))
    }

    /// Tail-equivalent survival function `kappa exp(-z^2)/z^2`,
    /// `z^2 = (ln x - mu2)^2 / (2 sigma^2)`.
    pub fn tail_equiv(&self, x: f64) -> Result<f64> {
        Self::check(x, "signal_strength_tail_equiv")?;
        let t = x.ln() - self.consts.mu2;
        if t == 0.0 {
            return Err(domain("signal_strength_tail_equiv", "ln x equals mu2"));
        }
        let z2 = t * t / (2.0 * self.params.sigma_x * self.params.sigma_x);
        Ok(self.consts.kappa * (-z2).exp() / z2)
    }

    fn log_bracket(&self) -> (f64, f64) {
        let s = self.params.sigma_x;
        (self.consts.mu1 - 40.0 * s, self.consts.mu4 + 40.0 * s)
    }

    /// x with F_P(x) = p.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("signal_strength_quantile", format!("p = {p} outside (0, 1)")));
        }
        if p > 0.5 {
            return self.isf(1.0 - p);
        }
        let (lo, hi) = self.log_bracket();
        let t = brent(|t| self.cdf_direct(t.exp()).max(1e-300).ln() - p.ln(), lo, hi, 1e-13)?;
        Ok(t.exp())
    }

    /// x with 1 - F_P(x) = q; usable for q far below machine epsilon.
    pub fn isf(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(domain("signal_strength_isf", format!("q = {q} outside (0, 1)")));
        }
        let (lo, hi) = self.log_bracket();
        let t = brent(
            |t| {
                let x = t.exp();
                let s = if x < self.median_guess() { 1.0 - self.cdf_direct(x) } else { self.sf_direct(x) };
                s.max(1e-300).ln() - q.ln()
            },
            lo,
            hi,
            1e-13,
        )?;
        Ok(t.exp())
    }

    /// Closed-form raw moment E[P^k], k > 0.
    pub fn moment(&self, k: f64) -> f64 {
        let (beta, g) = (self.params.beta, &self.geometry);
        let e = 2.0 - k * beta;
        let ring = g.r_b * g.r_b - g.r_min * g.r_min;
        let dist = if e.abs() < 1e-12 {
            2.0 * (g.r_b / g.r_min).ln() / ring
        } else {
            2.0 * (g.r_b.powf(e) - g.r_min.powf(e)) / (e * ring)
        };
        self.params.a_norm.powf(k) * dist * (0.5 * k * k * self.params.sigma_x * self.params.sigma_x).exp()
    }

    /// E[P^k] by quadrature against the density (in ln x).
    pub fn moment_by_quadrature(&self, k: f64, tol: Tolerance) -> Result<f64> {
        let s = self.params.sigma_x;
        let lo = self.consts.mu1 - 12.0 * s;
        let hi = self.consts.mu4 + (k * s + 12.0) * s;
        let est = integrate(
            |t: f64| {
                let x = t.exp();
                self.pdf(x).unwrap_or(0.0) * x.powf(k + 1.0)
            },
            lo,
            hi,
            tol,
        )?;
        Ok(est.value)
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0)
    }

    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        (self.moment(2.0) - m * m).sqrt()
    }

    /// Draw one power: ring-uniform distance, lognormal shadow.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::{Distribution, StandardNormal};
        let u: f64 = rng.random();
        let d = sample_ring_distance(u, &self.geometry).expect("uniform in [0, 1)");
        let z: f64 = StandardNormal.sample(rng);
        self.params.a_norm * d.powf(-self.params.beta) * (self.params.sigma_x * z).exp()
    }
}

/// Radio settings of the reference deployment: 32 dBm through three floors,
/// 7 dB noise figure, 3.84 MHz, 8 dB shadowing at 290 K.
pub fn reference_radio() -> RadioConfig {
    RadioConfig {
        tx_power_dbm: 32.0,
        floors: 3,
        noise_figure_db: 7.0,
        bandwidth_hz: 3.84e6,
        sigma_db: 8.0,
        temperature_k: 290.0,
    }
}
