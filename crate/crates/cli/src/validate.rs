//! Invariant suite behind `maxsinr validate`.

use std::path::Path;
use std::process::ExitCode;

use maxsinr_core::extremes::MaxStrengthModel;
use maxsinr_core::interference::{char_fn_exact, char_fn_stable, delta_constant, StableLaw};
use maxsinr_core::montecarlo::{run_replications, EmpiricalDistribution, FieldSampler};
use maxsinr_core::numeric::Tolerance;
use maxsinr_core::propagation::sample_ring_distance;
use rand::Rng;
use serde::Serialize;

use crate::config::Config;
use crate::manifest::{ensure_dir, RunManifest};

/// Draws used by the simulated checks, whatever `reps` says.
const CHECK_DRAWS: u64 = 100_000;
/// KS critical value coefficient at the 1% level.
const KS_CRITICAL: f64 = 1.628;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub all_pass: bool,
    pub checks: Vec<Check>,
}

fn check(name: &'static str, f: impl FnOnce() -> anyhow::Result<(bool, String)>) -> Check {
    match f() {
        Ok((pass, detail)) => Check { name, pass, detail },
        Err(e) => Check { name, pass: false, detail: format!("error: {e:#}") },
    }
}

pub fn checks(cfg: &Config) -> anyhow::Result<Vec<Check>> {
    let seed = cfg.seed.unwrap_or_default();
    let signal = cfg.signal()?;
    let field = cfg.field()?;
    let geometry = cfg.geometry()?;
    let draws = cfg.reps.min(CHECK_DRAWS);
    let ks_limit = KS_CRITICAL / (draws as f64).sqrt();
    let scan_n = cfg.n_max.min(10);
    let mut out = Vec::new();

    out.push(check("signal_cdf_valid", || {
        let lo = signal.quantile(1e-9)?;
        let hi = signal.isf(1e-9)?;
        let mut prev = 0.0;
        let mut ok = true;
        for k in 0..2000 {
            let x = (lo.ln() + (hi / lo).ln() * k as f64 / 1999.0).exp();
            let f = signal.cdf(x)?;
            ok &= (0.0..=1.0).contains(&f) && f >= prev;
            prev = f;
        }
        Ok((ok, "F_P in [0, 1] and nondecreasing on 2000 log-spaced points".into()))
    }));

    out.push(check("signal_pdf_mass", || {
        let mass = signal.moment_by_quadrature(0.0, Tolerance::new(1e-12, 1e-10))?;
        Ok(((mass - 1.0).abs() < 1e-6, format!("integral of f_P = {mass:.9}")))
    }));

    out.push(check("signal_oracle", || {
        let p = signal.params;
        let samples = run_replications(seed, draws, |rng, _| {
            let d = sample_ring_distance(rng.random(), &geometry)?;
            let z: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, rng);
            Ok(p.a_norm * d.powf(-p.beta) * (p.sigma_x * z).exp())
        })?;
        let ks = EmpiricalDistribution::new(samples)?.ks_distance(|x| signal.cdf(x).unwrap_or(f64::NAN));
        Ok((ks < ks_limit, format!("KS = {ks:.5} over {draws} draws (limit {ks_limit:.5})")))
    }));

    let sampler = FieldSampler::new(field, geometry)?;
    out.push(check("lemma_identity", || {
        let flags = run_replications(seed ^ 1, 1000, |rng, _| {
            let n = rng.random_range(1..=scan_n);
            Ok(sampler.realize_metrics(&sampler.sample(rng, n)?).lemma_identity)
        })?;
        let bad = flags.iter().filter(|&&f| !f).count();
        Ok((bad == 0, format!("{bad} of 1000 realizations violate the max-power/max-SINR identity")))
    }));

    out.push(check("max_law_vs_simulation", || {
        let model = MaxStrengthModel::new(scan_n, signal)?;
        let m = run_replications(seed ^ 2, draws, |rng, _| Ok(sampler.realize_metrics(&sampler.sample(rng, scan_n)?).m_n))?;
        let ks = EmpiricalDistribution::new(m)?.ks_distance(|x| model.cdf(x).unwrap_or(f64::NAN));
        Ok((ks < ks_limit, format!("n = {scan_n}: KS = {ks:.5} (limit {ks_limit:.5})")))
    }));

    out.push(check("max_cdf_valid", || {
        let model = MaxStrengthModel::new(scan_n, signal)?;
        let lo = model.quantile(1e-9)?;
        let hi = model.quantile(1.0 - 1e-9)?;
        let mut prev = 0.0;
        let mut ok = true;
        for k in 0..1000 {
            let x = (lo.ln() + (hi / lo).ln() * k as f64 / 999.0).exp();
            let f = model.cdf(x)?;
            ok &= (0.0..=1.0).contains(&f) && f >= prev;
            prev = f;
        }
        Ok((ok, format!("F_M in [0, 1] and nondecreasing for n = {scan_n}")))
    }));

    out.push(check("char_fn_at_zero", || {
        let sp = delta_constant(&field)?;
        let exact = char_fn_exact(0.0, &field, Tolerance::new(1e-12, 1e-9))?;
        let stable = char_fn_stable(0.0, &sp);
        let w = 1.3;
        let a = char_fn_exact(w, &field, Tolerance::new(1e-12, 1e-9))?;
        let b = char_fn_exact(-w, &field, Tolerance::new(1e-12, 1e-9))?;
        let ok = exact.re == 1.0 && exact.im == 0.0 && stable.re == 1.0 && stable.im == 0.0 && (a - b.conj()).norm() < 1e-12;
        Ok((ok, format!("phi(0) = {exact}, stable phi(0) = {stable}, |phi({w})| = {:.6}", a.norm())))
    }));

    out.push(check("interference_mass", || {
        let law = StableLaw::new(delta_constant(&field)?)?;
        let mass = law.inverted_mass()?;
        Ok(((mass - 1.0).abs() < 1e-3, format!("inverted density mass = {mass:.6}")))
    }));

    out.push(check("gumbel_constants", || {
        let n = cfg.n_max.max(2);
        let g = MaxStrengthModel::new(n, signal)?.normalization()?;
        let ok = g.c_n > 0.0 && g.d_n > 0.0 && g.c_n.is_finite() && g.d_n.is_finite();
        Ok((ok, format!("n = {n}: c_n = {:.6e}, d_n = {:.6e}", g.c_n, g.d_n)))
    }));

    Ok(out)
}

pub fn run(cfg: &Config, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let mut manifest = RunManifest::new("validate", cfg);
    let checks = manifest.timed("checks", || checks(cfg))?;
    for c in &checks {
        eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let report = Report { config_hash: cfg.hash(), seed: cfg.seed, all_pass: checks.iter().all(|c| c.pass), checks };
    let json = serde_json::to_string_pretty(&report)?;
    println!("{json}");
    if let Some(dir) = out {
        ensure_dir(dir)?;
        let path = dir.join("report.json");
        std::fs::write(&path, json + "\n")?;
        manifest.record(&path);
        manifest.write(dir)?;
    }
    Ok(if report.all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
