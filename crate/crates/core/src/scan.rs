//! Choosing how many cells to scan: acceleration, growth factor and the
//! throughput-optimal scan count.

use serde::{Deserialize, Serialize};

use crate::best_signal::ThroughputCurve;
use crate::error::{domain, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    /// Data transmission is suspended while scanning.
    Compressed,
    /// Scanning runs alongside transmission.
    Parallel,
}

impl std::str::FromStr for ScanMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "compressed" => Ok(Self::Compressed),
            "parallel" => Ok(Self::Parallel),
            other => Err(format!("unknown scan mode `{other}` (expected compressed or parallel)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanTiming<T = f64> {
    /// Mean time spent in a cell (s).
    pub residence_time_s: T,
    /// Time to scan one cell (s).
    pub per_cell_scan_s: T,
    pub mode: ScanMode,
}

impl<T: Real> ScanTiming<T> {
    pub fn new(residence_time_s: T, per_cell_scan_s: T, mode: ScanMode) -> Result<Self> {
        if !(residence_time_s > T::zero()) || !(per_cell_scan_s > T::zero()) {
            return Err(domain("ScanTiming", "residence and per-cell scan times must be positive"));
        }
        Ok(Self { residence_time_s, per_cell_scan_s, mode })
    }
}

/// Transmission gap caused by scanning `n` cells.
pub fn scan_gap<T: Real>(n: usize, timing: &ScanTiming<T>) -> T {
    match timing.mode {
        ScanMode::Compressed => timing.per_cell_scan_s * T::lit(n as f64),
        ScanMode::Parallel => T::zero(),
    }
}

fn lookup<T: Real>(curve: &ThroughputCurve<T>, n: usize) -> Result<T> {
    curve
        .xi(n)
        .ok_or_else(|| domain("acceleration", format!("throughput curve has no point at n = {n}")))
}

/// Acceleration `rho_n = T/(T + L(n)) E xi_n / E xi_0`, with the no-scan
/// baseline `E xi_0` taken as `E xi_1` (one cell picked at random).
pub fn acceleration<T: Real>(n: usize, timing: &ScanTiming<T>, curve: &ThroughputCurve<T>) -> Result<T> {
    if n == 0 {
        return Ok(T::one());
    }
    let base = lookup(curve, 1)?;
    if !(base > T::zero()) {
        return Err(domain("acceleration", "baseline throughput must be positive"));
    }
    let t = timing.residence_time_s;
    Ok(t / (t + scan_gap(n, timing)) * lookup(curve, n)? / base)
}

/// Growth factor `g_n = rho_n / rho_{n-1}`.
pub fn growth_factor<T: Real>(n: usize, timing: &ScanTiming<T>, curve: &ThroughputCurve<T>) -> Result<T> {
    if n == 0 {
        return Err(domain("growth_factor", "n must be at least 1"));
    }
    let prev = acceleration(n - 1, timing, curve)?;
    if prev == T::zero() {
        return Err(domain("growth_factor", format!("rho at n = {} is zero", n - 1)));
    }
    Ok(acceleration(n, timing, curve)? / prev)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint<T = f64> {
    pub n: usize,
    pub rho: T,
    pub g: T,
}

/// Recommended scan count with the curves it was read from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPlan<T = f64> {
    pub n_star: usize,
    pub delta_g: Option<T>,
    /// False when no scan size meets the growth constraint; `n_star` is then 1.
    pub feasible: bool,
    pub curves: Vec<CurvePoint<T>>,
    pub timing: ScanTiming<T>,
    pub config_hash: Option<String>,
    pub note: Option<String>,
}

impl<T: Real> ScanPlan<T> {
    pub fn rho_curve(&self) -> Vec<(usize, T)> {
        self.curves.iter().map(|p| (p.n, p.rho)).collect()
    }

    pub fn growth_curve(&self) -> Vec<(usize, T)> {
        self.curves.iter().map(|p| (p.n, p.g)).collect()
    }
}

/// Scan size maximizing `rho_n` (ties go to the smaller n). With `delta_g`,
/// the search is limited to `n <= n_c`, where `n_c` is the largest n such
/// that `g_k >= 1 + delta_g` for every `2 <= k <= n`; `g_1` compares against
/// the no-scan baseline and is not constrained.
pub fn optimal_scan_count<T: Real>(
    timing: &ScanTiming<T>,
    curve: &ThroughputCurve<T>,
    delta_g: Option<T>,
) -> Result<ScanPlan<T>> {
    let ns = &curve.n_values;
    if ns[0] != 1 || ns.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(domain("optimal_scan_count", "curve must cover a contiguous range starting at n = 1"));
    }
    let curves: Vec<CurvePoint<T>> = ns
        .iter()
        .map(|&n| {
            Ok(CurvePoint { n, rho: acceleration(n, timing, curve)?, g: growth_factor(n, timing, curve)? })
        })
        .collect::<Result<_>>()?;

    let mut limit = curves.len();
    let mut feasible = true;
    if let Some(dg) = delta_g {
        let bar = T::one() + dg;
        limit = curves.iter().skip(1).take_while(|p| p.g >= bar).count() + 1;
        feasible = limit >= 2;
    }
    let n_star = if feasible {
        let mut best = 0;
        for (k, p) in curves.iter().enumerate().take(limit) {
            if p.rho > curves[best].rho {
                best = k;
            }
        }
        curves[best].n
    } else {
        1
    };
    let note = match (timing.mode, feasible) {
        (_, false) => Some("no scan size meets the growth constraint".to_string()),
        (ScanMode::Parallel, true) => {
            Some("parallel scanning has no transmission gap; rho tracks the throughput curve".to_string())
        }
        _ => None,
    };
    Ok(ScanPlan { n_star, delta_g, feasible, curves, timing: *timing, config_hash: None, note })
}
