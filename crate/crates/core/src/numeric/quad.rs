//! Adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! The integrator is generic over the integrand's value type so the same
//! machinery handles real densities and complex characteristic functions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-9,
            max_intervals: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    pub fn with_max_intervals(mut self, max_intervals: usize) -> Self {
        self.max_intervals = max_intervals;
        self
    }
}

/// Result of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub abs_err: f64,
    pub evaluations: usize,
}

struct Segment<V> {
    lower: f64,
    upper: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 21-point Kronrod rule on `[a, b]` with its embedded Gauss error estimate.
pub fn gauss_kronrod<V, F>(f: &mut F, a: f64, b: f64) -> (V, f64)
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut kronrod = f_center * WGK[10];
    let mut gauss = V::default();
    let mut res_abs = f_center.magnitude() * WGK[10];
    let mut fv1 = [V::default(); 10];
    let mut fv2 = [V::default(); 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }

    let abs_half = half.abs();
    let err = rescale_error(
        ((kronrod - gauss) * half).magnitude(),
        res_abs * abs_half,
        res_asc * abs_half,
    );
    (kronrod * half, err)
}

/// Adaptive bisection driven by the largest local error.
pub fn integrate<V, F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    if a == b {
        return Ok(Estimate {
            value: V::default(),
            abs_err: 0.0,
            evaluations: 0,
        });
    }
    let (value, err) = gauss_kronrod(&mut f, a, b);
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        lower: a,
        upper: b,
        value,
        err,
    });
    let mut total = value;
    let mut total_err = err;

    while total_err > tol.abs.max(tol.rel * total.magnitude()) {
        if heap.len() >= tol.max_intervals {
            return Err(Error::Quadrature {
                lower: a,
                upper: b,
                estimate: total.magnitude(),
                abs_err: total_err,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lower + worst.upper);
        // Interval has collapsed to roundoff; nothing more to gain.
        if mid <= worst.lower || mid >= worst.upper {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod(&mut f, worst.lower, mid);
        let (v2, e2) = gauss_kronrod(&mut f, mid, worst.upper);
        evaluations += 42;
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            lower: worst.lower,
            upper: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            lower: mid,
            upper: worst.upper,
            value: v2,
            err: e2,
        });
        // Re-sum periodically so cancellation in the running totals cannot drift.
        if heap.len() % 64 == 0 {
            total = heap.iter().fold(V::default(), |acc, s| acc + s.value);
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }

    let value = heap.iter().fold(V::default(), |acc, s| acc + s.value);
    let abs_err = heap.iter().map(|s| s.err).sum();
    Ok(Estimate {
        value,
        abs_err,
        evaluations,
    })
}

/// Integrate over the consecutive sub-intervals delimited by `points`
/// (ascending, endpoints included). Each piece gets its share of the
/// absolute tolerance.
pub fn integrate_pieces<V, F>(mut f: F, points: &[f64], tol: Tolerance) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let pieces = points.len().saturating_sub(1).max(1);
    let piece_tol = Tolerance {
        abs: tol.abs / pieces as f64,
        ..tol
    };
    let mut out = Estimate {
        value: V::default(),
        abs_err: 0.0,
        evaluations: 0,
    };
    for w in points.windows(2) {
        let est = integrate(&mut f, w[0], w[1], piece_tol)?;
        out.value = out.value + est.value;
        out.abs_err += est.abs_err;
        out.evaluations += est.evaluations;
    }
    Ok(out)
}

/// Integrate an oscillatory integrand on `[start, stop]` split into panels of
/// width `panel`, typically a half period of the dominant frequency.
pub fn integrate_panels<V, F>(
    mut f: F,
    start: f64,
    stop: f64,
    panel: f64,
    tol: Tolerance,
) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let count = ((stop - start) / panel).ceil().max(1.0) as usize;
    let width = (stop - start) / count as f64;
    let panel_tol = Tolerance {
        abs: tol.abs / count as f64,
        ..tol
    };
    let mut out = Estimate {
        value: V::default(),
        abs_err: 0.0,
        evaluations: 0,
    };
    for k in 0..count {
        let lo = start + k as f64 * width;
        let hi = if k + 1 == count { stop } else { lo + width };
        let est = integrate(&mut f, lo, hi, panel_tol)?;
        out.value = out.value + est.value;
        out.abs_err += est.abs_err;
        out.evaluations += est.evaluations;
    }
    Ok(out)
}
