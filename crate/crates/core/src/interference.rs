//! Aggregate interference of a Poisson field of lognormally shadowed sites:
//! the exact characteristic function, its totally skewed stable
//! approximation, and Fourier inversion of the latter.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::special::{gamma, ln_gamma};
use crate::numeric::{integrate, integrate_panels, integrate_pieces, Hermite, Tolerance};
use crate::propagation::PropagationParams;
use crate::real::Real;

/// Poisson field of sites outside radius `r_min`, truncated at `r_inf` for
/// simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkField {
    /// Sites per square metre.
    pub lambda: f64,
    pub r_min: f64,
    pub r_inf: f64,
    pub params: PropagationParams,
}

impl NetworkField {
    pub fn new(lambda: f64, r_min: f64, r_inf: f64, params: PropagationParams) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(domain("NetworkField", format!("lambda = {lambda} must be positive")));
        }
        if !(r_min > 0.0 && r_min < r_inf) {
            return Err(domain(
                "NetworkField",
                format!("need 0 < r_min < r_inf, got r_min = {r_min}, r_inf = {r_inf}"),
            ));
        }
        Ok(Self { lambda, r_min, r_inf, params })
    }
}

/// Parameters of the stable approximation `exp(-delta |w|^alpha [1 - j sign(w) tan(pi alpha/2)])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableApproxParams {
    pub alpha: f64,
    pub delta: f64,
}

impl StableApproxParams {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain("StableApproxParams", format!("alpha = {alpha} outside (0, 1)")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain("StableApproxParams", format!("delta = {delta} must be positive")));
        }
        Ok(Self { alpha, delta })
    }

    /// Constant `c` of the Laplace transform `E exp(-sI) = exp(-c s^alpha)`.
    pub fn laplace_constant(&self) -> f64 {
        self.delta / (FRAC_PI_2 * self.alpha).cos()
    }

    /// Natural scale `c^{1/alpha}` of the law.
    pub fn scale(&self) -> f64 {
        self.laplace_constant().powf(1.0 / self.alpha)
    }

    fn skew(&self) -> f64 {
        (FRAC_PI_2 * self.alpha).tan()
    }
}

/// E[X^alpha] for X lognormal with parameters (0, sigma_x).
pub fn lognormal_fractional_moment<T: Real>(alpha: T, sigma_x: T) -> T {
    (T::lit(0.5) * alpha * alpha * sigma_x * sigma_x).exp()
}

/// `1 - E exp(j t X)` for X lognormal (0, sigma), by rotating the integration
/// contour of the log-variable by `j pi/2`, which turns the oscillating kernel
/// into `exp(-t e^s)`.
pub fn lognormal_cf_complement(t: f64, sigma: f64, tol: Tolerance) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if t < 0.0 {
        return Ok(lognormal_cf_complement(-t, sigma, tol)?.conj());
    }
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let shift = Complex64::new(0.0, FRAC_PI_2);
    let two_var = 2.0 * sigma * sigma;
    let lo = -9.0 * sigma;
    let hi = sigma * sigma + 9.0 * sigma;
    let knee = (-t.ln()).clamp(lo, hi);
    let est = integrate_pieces(
        |s: f64| {
            let kernel = ((Complex64::new(s, 0.0) + shift).powi(2) / (-two_var)).exp();
            kernel * (-(-t * s.exp()).exp_m1())
        },
        &[lo, knee, hi],
        tol,
    )?;
    Ok(est.value * norm)
}

/// Characteristic function of a lognormal (0, sigma) variable.
pub fn lognormal_cf(t: f64, sigma: f64, tol: Tolerance) -> Result<Complex64> {
    Ok(Complex64::new(1.0, 0.0) - lognormal_cf_complement(t, sigma, tol)?)
}

/// Exact characteristic function of the interference from an untruncated
/// field outside `r_min`.
pub fn char_fn_exact(w: f64, field: &NetworkField, tol: Tolerance) -> Result<Complex64> {
    if w == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if w < 0.0 {
        return Ok(char_fn_exact(-w, field, tol)?.conj());
    }
    let p = &field.params;
    let alpha = p.alpha();
    let top = p.a_norm * w * field.r_min.powf(-p.beta);
    // t = tau^q removes the t^{-alpha} endpoint behaviour.
    let q = 1.0 / (1.0 - alpha);
    let tau_max = top.powf(1.0 - alpha);
    let inner = Tolerance::new(1e-13, 1e-10);
    let mut failure = None;
    let knee = tau_max.min(1.0);
    let est = integrate_pieces(
        |tau: f64| {
            if tau == 0.0 {
                return Complex64::new(0.0, -q * lognormal_fractional_moment(1.0, p.sigma_x));
            }
            let t = tau.powf(q);
            match lognormal_cf_complement(t, p.sigma_x, inner) {
                Ok(c) => c * (q / t),
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &[0.0, knee, tau_max],
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let exponent = -PI * field.lambda * alpha * (p.a_norm * w).powf(alpha) * est.value;
    Ok(exponent.exp())
}

/// Closed-form stable approximation of the interference characteristic function.
pub fn char_fn_stable(w: f64, sp: &StableApproxParams) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let mag = sp.delta * w.abs().powf(sp.alpha);
    Complex64::new(-mag, mag * w.signum() * sp.skew()).exp()
}

/// Stable-approximation constants of a field.
pub fn delta_constant(field: &NetworkField) -> Result<StableApproxParams> {
    let p = &field.params;
    if p.beta <= 2.0 {
        return Err(domain(
            "delta_constant",
            format!("beta = {} gives alpha = 2/beta >= 1; need beta > 2", p.beta),
        ));
    }
    let alpha = p.alpha();
    let delta = PI
        * field.lambda
        * p.a_norm.powf(alpha)
        * lognormal_fractional_moment(alpha, p.sigma_x)
        * gamma(1.0 - alpha)
        * (FRAC_PI_2 * alpha).cos();
    StableApproxParams::new(alpha, delta)
}

/// Worst relative gap `|phi_exact - phi_stable| / |phi_exact|` over `points`
/// frequencies in the band where `exp(-delta w^alpha) > floor`.
pub fn stable_disagreement(field: &NetworkField, points: usize, floor: f64) -> Result<f64> {
    let sp = delta_constant(field)?;
    let w_top = ((-floor.ln()) / sp.delta).powf(1.0 / sp.alpha);
    let mut worst = 0.0f64;
    for k in 1..=points {
        let w = w_top * k as f64 / points as f64;
        let exact = char_fn_exact(w, field, Tolerance::new(1e-12, 1e-9))?;
        worst = worst.max((exact - char_fn_stable(w, &sp)).norm() / exact.norm());
    }
    Ok(worst)
}

/// Knobs for Fourier inversion of the stable law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    /// Frequencies where `exp(-delta w^alpha)` falls below this are dropped.
    pub envelope_cutoff: f64,
    pub tol: Tolerance,
    /// Series tail is used where `c v^{-alpha}` is at most this.
    pub series_threshold: f64,
    pub table_nodes: usize,
    /// Lowest tabulated point, in units of the law's scale.
    pub table_floor: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            envelope_cutoff: 1e-12,
            tol: Tolerance::new(1e-13, 1e-10),
            series_threshold: 0.5,
            table_nodes: 400,
            table_floor: 0.01,
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Integrand of `P(lo <= I <= hi)` at frequency `w`, written with the
/// window length `len = hi - lo` and centre `mid`. Finite at `w = 0`.
pub fn window_integrand(w: f64, len: f64, mid: f64, sp: &StableApproxParams) -> f64 {
    let spread = sp.delta * w.powf(sp.alpha);
    (-spread).exp() * (w * mid - spread * sp.skew()).cos() * len * sinc(0.5 * w * len) / PI
}

/// Totally skewed stable law on `[0, inf)` with tabulated CDF for fast
/// repeated evaluation.
#[derive(Debug, Clone)]
pub struct StableLaw {
    pub params: StableApproxParams,
    pub cfg: InversionConfig,
    c_laplace: f64,
    v_switch: f64,
    /// Power-series coefficients in `z = c v^{-alpha}` of the survival
    /// function and of `v` times the density, valid up to the switch.
    sf_coeffs: Vec<f64>,
    pdf_coeffs: Vec<f64>,
    ln_v_lo: f64,
    ln_v_hi: f64,
    cdf_table: Hermite,
}

impl StableLaw {
    pub fn new(params: StableApproxParams) -> Result<Self> {
        Self::with_config(params, InversionConfig::default())
    }

    pub fn with_config(params: StableApproxParams, cfg: InversionConfig) -> Result<Self> {
        let c_laplace = params.laplace_constant();
        let v_switch = (c_laplace / cfg.series_threshold).powf(1.0 / params.alpha);
        let v_lo = cfg.table_floor * params.scale();
        if v_lo >= v_switch {
            return Err(domain("StableLaw", "table floor lies above the series switch"));
        }
        let (ln_v_lo, ln_v_hi) = (v_lo.ln(), v_switch.ln());
        let nodes = cfg.table_nodes.max(8);
        let step = (ln_v_hi - ln_v_lo) / (nodes - 1) as f64;
        let xs: Vec<f64> = (0..nodes).map(|i| ln_v_lo + step * i as f64).collect();
        let vs: Vec<f64> = xs.iter().map(|t| t.exp()).collect();

        let mut law = Self {
            params,
            cfg,
            c_laplace,
            v_switch,
            sf_coeffs: series_coefficients(params.alpha, cfg.series_threshold, false),
            pdf_coeffs: series_coefficients(params.alpha, cfg.series_threshold, true),
            ln_v_lo,
            ln_v_hi,
            cdf_table: Hermite::with_slopes(vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]),
        };
        let mut cdf = Vec::with_capacity(nodes);
        let mut acc = law.window_direct(0.0, vs[0])?;
        cdf.push(acc);
        for pair in vs.windows(2) {
            acc += law.window_direct(pair[0], pair[1])?;
            cdf.push(acc);
        }
        let slopes: Vec<f64> = vs
            .iter()
            .map(|&v| Ok(v * law.pdf_direct(v)?))
            .collect::<Result<_>>()?;
        law.cdf_table = Hermite::with_slopes(xs, cdf, slopes);
        Ok(law)
    }

    /// Point above which the convergent tail series is used.
    pub fn series_switch(&self) -> f64 {
        self.v_switch
    }

    fn w_max(&self) -> f64 {
        ((-self.cfg.envelope_cutoff.ln()) / self.params.delta).powf(1.0 / self.params.alpha)
    }

    /// `P(lo <= I <= hi)` by direct Fourier inversion.
    pub fn window_direct(&self, lo: f64, hi: f64) -> Result<f64> {
        self.window_direct_with(lo, hi, self.cfg.envelope_cutoff, self.cfg.tol)
    }

    /// As [`Self::window_direct`] with an explicit envelope cutoff and tolerance.
    pub fn window_direct_with(&self, lo: f64, hi: f64, cutoff: f64, tol: Tolerance) -> Result<f64> {
        if !(lo >= 0.0 && hi >= lo) {
            return Err(domain("stable_window", format!("need 0 <= lo <= hi, got [{lo}, {hi}]")));
        }
        if hi == lo {
            return Ok(0.0);
        }
        let (len, mid) = (hi - lo, 0.5 * (lo + hi));
        let sp = self.params;
        let est = integrate_panels(
            |w: f64| window_integrand(w, len, mid, &sp),
            0.0,
            ((-cutoff.ln()) / sp.delta).powf(1.0 / sp.alpha),
            PI / hi.max(1.0),
            tol,
        )?;
        Ok(est.value)
    }

    /// Density by direct Fourier inversion.
    pub fn pdf_direct(&self, v: f64) -> Result<f64> {
        if v < 0.0 {
            return Err(domain("interference_pdf", format!("v = {v} must be nonnegative")));
        }
        let sp = self.params;
        let est = integrate_panels(
            |w: f64| {
                let spread = sp.delta * w.powf(sp.alpha);
                (-spread).exp() * (w * v - spread * sp.skew()).cos() / PI
            },
            0.0,
            self.w_max(),
            PI / v.max(1.0),
            self.cfg.tol,
        )?;
        Ok(est.value)
    }

    fn series_terms(&self, v: f64, density: bool) -> f64 {
        let z = self.c_laplace * v.powf(-self.params.alpha);
        let scale = if density { 1.0 / v } else { 1.0 };
        if z <= self.cfg.series_threshold {
            let coeffs = if density { &self.pdf_coeffs } else { &self.sf_coeffs };
            let poly = coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c) * z;
            return poly * scale;
        }
        let alpha = self.params.alpha;
        let mut total = 0.0;
        let mut ln_zk_fact = 0.0;
        for k in 1..400 {
            let kf = k as f64;
            ln_zk_fact += z.ln() - kf.ln();
            let size = (ln_zk_fact + series_ln_gamma(alpha, kf, density)).exp();
            total += series_sign(k) * size * (PI * alpha * kf).sin();
            // sin(pi alpha k) can vanish, so stop on the magnitude bound instead.
            if size < 1e-18 * total.abs() {
                break;
            }
        }
        total * scale / PI
    }

    /// Tail series for the survival function, convergent for every v > 0.
    pub fn sf_series(&self, v: f64) -> f64 {
        self.series_terms(v, false)
    }

    pub fn pdf_series(&self, v: f64) -> f64 {
        self.series_terms(v, true)
    }

    /// CDF from the table, with the series above the switch point.
    pub fn cdf(&self, v: f64) -> Result<f64> {
        if v <= 0.0 {
            return Ok(0.0);
        }
        let t = v.ln();
        let out = if t >= self.ln_v_hi {
            1.0 - self.sf_series(v)
        } else if t >= self.ln_v_lo {
            self.cdf_table.eval(t)
        } else {
            // The left tail decays like exp(-C v^{-alpha/(1-alpha)}); below 1% of
            // the scale it is under 1e-10 for every alpha in [1/2, 1).
            0.0
        };
        Ok(out.clamp(0.0, 1.0))
    }

    pub fn sf(&self, v: f64) -> Result<f64> {
        if v <= 0.0 {
            return Ok(1.0);
        }
        if v >= self.v_switch {
            return Ok(self.sf_series(v).clamp(0.0, 1.0));
        }
        Ok((1.0 - self.cdf(v)?).clamp(0.0, 1.0))
    }

    /// `P(lo <= I <= hi)` from the tabulated law.
    pub fn window(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo >= self.v_switch {
            return Ok((self.sf_series(lo) - self.sf_series(hi)).max(0.0));
        }
        Ok((self.cdf(hi)? - self.cdf(lo)?).max(0.0))
    }

    pub fn pdf(&self, v: f64) -> Result<f64> {
        if v >= self.v_switch {
            return Ok(self.pdf_series(v));
        }
        self.pdf_direct(v)
    }

    /// Total probability of the density recovered by inversion: quadrature of
    /// the density below the series switch plus the series tail above it.
    pub fn inverted_mass(&self) -> Result<f64> {
        let top = self.v_switch;
        let lo = self.params.scale() * self.cfg.table_floor;
        let mut failure = None;
        let mut pdf = |v: f64| {
            self.pdf_direct(v).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        };
        let below = integrate(&mut pdf, 0.0, lo, Tolerance::new(1e-10, 1e-8))?.value;
        let body = integrate(|t: f64| t.exp() * pdf(t.exp()), lo.ln(), top.ln(), Tolerance::new(1e-10, 1e-8))?.value;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(below + body + self.sf_series(top))
    }
}

fn series_sign(k: usize) -> f64 {
    if k % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

fn series_ln_gamma(alpha: f64, k: f64, density: bool) -> f64 {
    if density {
        ln_gamma(alpha * k + 1.0)
    } else {
        ln_gamma(alpha * k)
    }
}

/// Coefficients `a_k` (k >= 1, stored from k = 1) of the tail series in
/// powers of `z`, truncated once `|a_k| z_max^k` is negligible.
fn series_coefficients(alpha: f64, z_max: f64, density: bool) -> Vec<f64> {
    let mut out = Vec::new();
    let mut ln_fact = 0.0;
    for k in 1..400 {
        let kf = k as f64;
        ln_fact += kf.ln();
        let size = (series_ln_gamma(alpha, kf, density) - ln_fact).exp();
        out.push(series_sign(k) * size * (PI * alpha * kf).sin() / PI);
        if k > 4 && size * z_max.powi(k as i32) < 1e-20 {
            break;
        }
    }
    out
}

/// Density of the stable interference approximation at `v`.
pub fn interference_pdf(v: f64, law: &StableLaw) -> Result<f64> {
    law.pdf(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{derive_propagation_params, reference_radio};
    use approx::assert_relative_eq;

    fn reference_field() -> NetworkField {
        let p = derive_propagation_params(&reference_radio()).unwrap();
        NetworkField::new(1e-4, 2.0, 1e5, p).unwrap()
    }

    #[test]
    fn fractional_moment_values() {
        assert_eq!(lognormal_fractional_moment(0.0f64, 1.8), 1.0);
        assert_relative_eq!(lognormal_fractional_moment(1.0f64, 1.0), 0.5f64.exp(), max_relative = 1e-15);
        let sx = 1.842_068_074_395_236_6f64;
        assert!((lognormal_fractional_moment(2.0 / 3.0, sx) - 2.126).abs() < 1e-3);
    }

    #[test]
    fn frozen_delta() {
        // Independent 40-digit evaluation.
        let sp = delta_constant(&reference_field()).unwrap();
        assert_relative_eq!(sp.alpha, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(sp.delta, 2.847_554_942_103_560_4, max_relative = 1e-10);
        assert_relative_eq!((FRAC_PI_2 * sp.alpha).cos(), 0.5, max_relative = 1e-14);
    }

    #[test]
    fn doubling_lambda_doubles_delta() {
        let f = reference_field();
        let g = NetworkField { lambda: 2.0 * f.lambda, ..f };
        let (a, b) = (delta_constant(&f).unwrap(), delta_constant(&g).unwrap());
        assert_relative_eq!(b.delta, 2.0 * a.delta, max_relative = 1e-14);
    }

    #[test]
    fn flat_exponent_is_rejected() {
        let mut f = reference_field();
        f.params.beta = 2.0;
        assert!(delta_constant(&f).is_err());
    }

    #[test]
    fn lognormal_cf_small_and_known_values() {
        let tol = Tolerance::new(1e-14, 1e-11);
        // 1 - phi(t) ~ -j t E[X] for small t.
        let c = lognormal_cf_complement(1e-6, 0.5, tol).unwrap();
        assert_relative_eq!(c.im, -1e-6 * 0.125f64.exp(), max_relative = 1e-5);
        // Second-order check against the first two moments.
        let t = 1e-3;
        let c = lognormal_cf_complement(t, 0.5, tol).unwrap();
        let m2 = (2.0f64 * 0.25).exp();
        assert_relative_eq!(c.re, 0.5 * t * t * m2, max_relative = 1e-3);
        let phi = lognormal_cf(3.0, 1.0, tol).unwrap();
        assert!(phi.norm() < 1.0);
    }

    #[test]
    fn window_integrand_is_finite_at_origin() {
        let sp = StableApproxParams::new(2.0 / 3.0, 2.85).unwrap();
        let v = window_integrand(1e-300, 5.0, 10.0, &sp);
        assert!(v.is_finite());
        assert_relative_eq!(v, 5.0 / PI, max_relative = 1e-12);
    }

    #[test]
    fn series_and_inversion_agree_at_switch() {
        let law = StableLaw::new(delta_constant(&reference_field()).unwrap()).unwrap();
        let v = law.series_switch();
        let direct = 1.0 - law.window_direct(0.0, v).unwrap();
        assert_relative_eq!(law.sf_series(v), direct, max_relative = 1e-7);
        assert_relative_eq!(law.pdf_series(v), law.pdf_direct(v).unwrap(), max_relative = 1e-6);
    }

    #[test]
    fn table_matches_direct_inversion() {
        let law = StableLaw::new(delta_constant(&reference_field()).unwrap()).unwrap();
        for &v in &[0.5, 3.0, 7.7, 13.0, 30.0] {
            let direct = law.window_direct(0.0, v).unwrap();
            assert!((law.cdf(v).unwrap() - direct).abs() < 1e-9, "v = {v}");
        }
    }
}
