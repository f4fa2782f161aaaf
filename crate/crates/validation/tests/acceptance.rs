//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use maxsinr_core::best_signal::{throughput_curve_mc, BestSignalModel, QuadConfig, ThroughputCurve, ThroughputModel};
use maxsinr_core::extremes::MaxStrengthModel;
use maxsinr_core::interference::{char_fn_exact, char_fn_stable, delta_constant, NetworkField, StableLaw};
use maxsinr_core::montecarlo::{
    independence_diagnostic, replication_rng, run_replications, EmpiricalDistribution, FieldSampler, Histogram2D,
};
use maxsinr_core::numeric::Tolerance;
use maxsinr_core::propagation::{
    derive_propagation_params, reference_radio, sample_ring_distance, RingGeometry, SignalStrength,
};
use maxsinr_core::scan::{acceleration, growth_factor, optimal_scan_count, ScanMode, ScanTiming};
use maxsinr_core::Result;
use maxsinr_validation::*;
use rand::Rng;

struct Setup {
    field: NetworkField,
    geometry: RingGeometry,
    signal: SignalStrength,
    law: StableLaw,
    sampler: FieldSampler,
}

impl Setup {
    fn new() -> Result<Self> {
        let params = derive_propagation_params(&reference_radio())?;
        let geometry = RingGeometry::new(2.0, 1000.0)?;
        let field = NetworkField::new(1e-4, 2.0, 1e5, params)?;
        let law = StableLaw::new(delta_constant(&field)?)?;
        let sampler = FieldSampler::new(field, geometry)?;
        Ok(Self { field, geometry, signal: SignalStrength::new(params, geometry), law, sampler })
    }

    fn model_curve(&self) -> Result<ThroughputCurve> {
        let t = ThroughputModel::new(self.signal, self.law.clone(), QuadConfig::default())?;
        t.curve(&(1..=N_MAX).collect::<Vec<_>>(), BANDWIDTH_HZ)
    }

    fn scanned(&self, n: usize, reps: u64, seed: u64) -> Result<Vec<(f64, f64, f64)>> {
        run_replications(seed, reps, |rng, _| {
            let m = self.sampler.realize_metrics(&self.sampler.sample(rng, n)?);
            Ok((m.m_n, m.i_n, m.y_n))
        })
    }
}

fn timing() -> Result<ScanTiming> {
    ScanTiming::new(RESIDENCE_S, SCAN_S, ScanMode::Compressed)
}

fn scan_optimum(s: &Setup) -> Result<Outcome> {
    let start = Instant::now();
    let model = optimal_scan_count(&timing()?, &s.model_curve()?, None)?.n_star;
    let sim = throughput_curve_mc(&s.field, &s.geometry, N_MAX, BANDWIDTH_HZ, REPLICATIONS, SEED)?;
    let simulated = optimal_scan_count(&timing()?, &sim.curve, None)?.n_star;
    let secs = start.elapsed().as_secs_f64();
    let pass = MODEL_PEAK.contains(&model) && SIMULATED_PEAK.contains(&simulated) && secs <= RUNTIME_BUDGET_S;
    Ok(Outcome::new(
        1,
        "scan optimum",
        pass,
        format!(
            "model peak n = {model} (want {MODEL_PEAK:?}), simulated peak n = {simulated} (want {SIMULATED_PEAK:?}), {secs:.1} s"
        ),
    ))
}

fn tail_accuracy(s: &Setup) -> Result<Outcome> {
    let cfg = QuadConfig::default();
    let mut worst = Vec::new();
    for n in [10, 50] {
        let ys: Vec<f64> = s.scanned(n, REPLICATIONS, SEED + n as u64)?.into_iter().map(|t| t.2).collect();
        let sim = EmpiricalDistribution::new(ys)?;
        let model = BestSignalModel::new(MaxStrengthModel::new(n, s.signal)?, s.law.clone())?;
        let mut err = 0.0f64;
        for q in TAIL_LEVELS {
            let g = sim.quantile(q);
            err = err.max((model.best_quality_tail(g, &cfg)? - sim.tail(g)).abs());
        }
        worst.push((n, err));
    }
    let pass = worst.iter().all(|&(_, e)| e < TAIL_ABS_ERROR);
    let detail = worst.iter().map(|(n, e)| format!("n = {n}: {e:.4}")).collect::<Vec<_>>().join(", ");
    Ok(Outcome::new(2, "best-SINR tail", pass, format!("worst |model - simulated| {detail} (limit {TAIL_ABS_ERROR})")))
}

fn gumbel_direction(s: &Setup) -> Result<Outcome> {
    let steps = (8.0 / GUMBEL_STEP).round() as usize;
    let zs: Vec<f64> = (0..=steps).map(|k| -2.0 + GUMBEL_STEP * k as f64).collect();
    let d = GUMBEL_SIZES
        .iter()
        .map(|&n| MaxStrengthModel::new(n, s.signal)?.sup_distance_to_gumbel(&zs))
        .collect::<Result<Vec<_>>>()?;
    let pass = d.windows(2).all(|w| w[1] < w[0]);
    Ok(Outcome::new(3, "gumbel convergence", pass, format!("sup distances at n = {GUMBEL_SIZES:?}: {d:.4?}")))
}

fn diagnostic(s: &Setup, n: usize, seed: u64) -> Result<f64> {
    let (ms, is): (Vec<f64>, Vec<f64>) = s.scanned(n, REPLICATIONS, seed)?.into_iter().map(|t| (t.0, t.1)).unzip();
    Ok(independence_diagnostic(&Histogram2D::from_samples(&ms, &is, None)?)?.js)
}

fn independence(s: &Setup) -> Result<Outcome> {
    let mut medians = Vec::new();
    for n in INDEPENDENCE_SIZES {
        let mut v = INDEPENDENCE_SEEDS.iter().map(|&seed| diagnostic(s, n, seed)).collect::<Result<Vec<_>>>()?;
        v.sort_by(f64::total_cmp);
        medians.push(v[1]);
    }
    let at_50 = medians[1];
    let pass = at_50 < INDEPENDENCE_JS && medians.windows(2).all(|w| w[1] <= w[0]);
    Ok(Outcome::new(
        4,
        "asymptotic independence",
        pass,
        format!("3-seed median JS at n = {INDEPENDENCE_SIZES:?}: {medians:.4?} (n = 50 limit {INDEPENDENCE_JS}, nonincreasing)"),
    ))
}

fn distributions(s: &Setup) -> Result<Outcome> {
    let p = s.signal.params;
    let g = s.geometry;
    let draws = run_replications(SEED, POWER_SAMPLES, |rng, _| {
        let d = sample_ring_distance(rng.random(), &g)?;
        let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
        Ok(p.a_norm * d.powf(-p.beta) * (p.sigma_x * z).exp())
    })?;
    let ks_p = EmpiricalDistribution::new(draws)?.ks_distance(|x| s.signal.cdf(x).unwrap_or(f64::NAN));
    let mut ks_m = Vec::new();
    for n in [10, 50] {
        let m: Vec<f64> = s.scanned(n, REPLICATIONS, SEED + 100 + n as u64)?.into_iter().map(|t| t.0).collect();
        let model = MaxStrengthModel::new(n, s.signal)?;
        ks_m.push(EmpiricalDistribution::new(m)?.ks_distance(|x| model.cdf(x).unwrap_or(f64::NAN)));
    }
    let mass = s.law.inverted_mass()?;
    let pass = ks_p < KS_POWER && ks_m.iter().all(|&k| k < KS_MAXIMUM) && (mass - 1.0).abs() < MASS_ERROR;
    Ok(Outcome::new(
        5,
        "distribution suite",
        pass,
        format!("KS(F_P) = {ks_p:.5}, KS(F_M) at n = 10, 50: {ks_m:.5?}, interference mass = {mass:.6}"),
    ))
}

fn identities(s: &Setup) -> Result<Outcome> {
    let mut failures = Vec::new();

    let lemma = run_replications(SEED, IDENTITY_REALIZATIONS, |rng, _| {
        let n = rng.random_range(1..=N_MAX);
        Ok(s.sampler.realize_metrics(&s.sampler.sample(rng, n)?).lemma_identity)
    })?;
    if !lemma.iter().all(|&ok| ok) {
        failures.push("lemma identity");
    }

    let tol = Tolerance::new(1e-12, 1e-9);
    if char_fn_exact(0.0, &s.field, tol)? != num_complex_one() || char_fn_stable(0.0, &s.law.params) != num_complex_one() {
        failures.push("phi(0) = 1");
    }
    let mut rng = replication_rng(SEED, 1);
    for _ in 0..16 {
        let w: f64 = rng.random_range(0.01..20.0);
        let a = char_fn_exact(w, &s.field, tol)?;
        let b = char_fn_exact(-w, &s.field, tol)?;
        let c = char_fn_stable(w, &s.law.params);
        let d = char_fn_stable(-w, &s.law.params);
        if (a - b.conj()).norm() > 1e-12 || (c - d.conj()).norm() > 1e-12 || a.norm() > 1.0 + 1e-12 {
            failures.push("hermitian symmetry");
            break;
        }
    }

    let curve = s.model_curve()?;
    let t = timing()?;
    let rho1 = acceleration(1, &t, &curve)?;
    let mut prod = 1.0;
    for n in 2..=N_MAX {
        prod *= growth_factor(n, &t, &curve)?;
        let rho = acceleration(n, &t, &curve)?;
        if (prod - rho / rho1).abs() > IDENTITY_REL * rho / rho1 {
            failures.push("growth product");
            break;
        }
    }
    let base = optimal_scan_count(&t, &curve, None)?;
    for k in [1e-3, 7.0, 1e5] {
        let scaled = optimal_scan_count(&t, &curve.scaled(k), None)?;
        let same = scaled.n_star == base.n_star
            && scaled.curves.iter().zip(&base.curves).all(|(a, b)| (a.rho - b.rho).abs() <= IDENTITY_REL * b.rho);
        if !same {
            failures.push("rescaling invariance");
            break;
        }
    }

    let run = || throughput_curve_mc(&s.field, &s.geometry, 40, BANDWIDTH_HZ, 2_000, SEED);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool").install(run)?;
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().expect("pool").install(run)?;
    if one != four {
        failures.push("thread-count determinism");
    }

    let pass = failures.is_empty();
    let detail = if pass {
        format!("lemma identity over {IDENTITY_REALIZATIONS} realizations, phi(0), hermitian symmetry, growth product, rescaling, 1 vs 4 threads")
    } else {
        format!("violated: {}", failures.join(", "))
    };
    Ok(Outcome::new(6, "exact identities", pass, detail))
}

fn num_complex_one() -> num_complex::Complex64 {
    num_complex::Complex64::new(1.0, 0.0)
}

fn frozen_regressions(s: &Setup) -> Result<Outcome> {
    let edges: Vec<f64> = (0..=80).map(|k| -2.0 + 0.1 * k as f64).collect();
    let js = MaxStrengthModel::new(50, s.signal)?.js_to_gumbel(&edges)?;
    let indep = diagnostic(s, 50, INDEPENDENCE_SEEDS[0])?;
    let close = |a: f64, b: f64| (a / b - 1.0).abs() < FROZEN_REL;
    let pass = close(js, FROZEN_GUMBEL_JS_50) && close(indep, FROZEN_INDEPENDENCE_50);
    Ok(Outcome::new(
        7,
        "desk-scale reproducibility",
        pass,
        format!(
            "no claim needs beyond-desk resources; frozen JS(M_50, Gumbel) = {js:.8}, frozen independence JS at n = 50 = {indep:.8}"
        ),
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let setup = match Setup::new() {
        Ok(s) => s,
        Err(e) => {
            println!("FAIL setup: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: [(u32, fn(&Setup) -> Result<Outcome>); 7] = [
        (1, scan_optimum),
        (2, tail_accuracy),
        (3, gumbel_direction),
        (4, independence),
        (5, distributions),
        (6, identities),
        (7, frozen_regressions),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let line = match check(&setup) {
            Ok(o) => {
                failed += usize::from(!o.pass);
                o.to_string()
            }
            Err(e) => {
                failed += 1;
                format!("FAIL criterion {id}: error {e}")
            }
        };
        println!("{line}");
    }
    println!(
        "acceptance: {} of 7 criteria pass ({:.1} s)",
        7 - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
