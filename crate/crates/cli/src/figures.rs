//! CSV data series for the figures.
//!
//! | figure | columns |
//! |--------|---------|
//! | `mda_cdf` | n, z, model_cdf, mc_cdf, gumbel_cdf |
//! | `mda_jsdiv` | sigma_db, n, js |
//! | `joint_density` | ix, iy, m_lo, m_hi, i_lo, i_hi, joint, product (plus `samples_n50.csv`: rep_id, m_n, i_n, i_total, y_n) |
//! | `indep_jsdiv` | n, js, total |
//! | `scan_curves` | n, E_xi_model, E_xi_mc, E_xi_mc_se, rho_model, rho_mc, g_model, g_mc |

use std::path::Path;

use log::info;
use maxsinr_core::best_signal::throughput_curve_mc;
use maxsinr_core::extremes::{gumbel_cdf, MaxStrengthModel};
use maxsinr_core::montecarlo::{
    independence_diagnostic, normalize_samples, run_replications, FieldSampler, Histogram2D, Normalization,
};
use maxsinr_core::propagation::SignalStrength;
use maxsinr_core::scan::optimal_scan_count;

use crate::config::Config;
use crate::manifest::{ensure_dir, write_csv, RunManifest};
use crate::plan::model_curve;
use crate::Figure;

const MDA_SIZES: [usize; 3] = [10, 100, 1000];
const JS_SIGMAS_DB: [f64; 5] = [4.0, 6.0, 8.0, 10.0, 12.0];
const JS_SIZES: [usize; 9] = [2, 5, 10, 20, 50, 100, 200, 500, 1000];
const JOINT_N: usize = 50;
const INDEP_SIZES: [usize; 7] = [10, 25, 50, 100, 150, 200, 250];

fn num(x: f64) -> String {
    format!("{x}")
}

/// Normalized axis `[-2, 6]`.
fn z_grid(step: f64) -> Vec<f64> {
    let k = (8.0 / step).round() as usize;
    (0..=k).map(|i| -2.0 + step * i as f64).collect()
}

pub fn run(figure: Figure, cfg: &Config, out: &Path) -> anyhow::Result<()> {
    ensure_dir(out)?;
    let mut manifest = RunManifest::new(format!("fig {}", figure.id()), cfg);
    let seed = cfg.seed.unwrap_or_default();
    match figure {
        Figure::MdaCdf => mda_cdf(cfg, seed, out, &mut manifest)?,
        Figure::MdaJsdiv => mda_jsdiv(cfg, out, &mut manifest)?,
        Figure::JointDensity => joint_density(cfg, seed, out, &mut manifest)?,
        Figure::IndepJsdiv => indep_jsdiv(cfg, seed, out, &mut manifest)?,
        Figure::ScanCurves => scan_curves(cfg, seed, out, &mut manifest)?,
    }
    let path = manifest.write(out)?;
    info!("wrote {}", path.display());
    Ok(())
}

fn mda_cdf(cfg: &Config, seed: u64, out: &Path, manifest: &mut RunManifest) -> anyhow::Result<()> {
    let signal = cfg.signal()?;
    let zs = z_grid(0.05);
    let mut rows = Vec::new();
    for n in MDA_SIZES {
        let model = MaxStrengthModel::new(n, signal)?;
        let g = model.normalization()?;
        // Maxima of i.i.d. ring powers; n may exceed the expected ring count.
        let draws = manifest.timed(&format!("mda_cdf_n{n}"), || {
            Ok(run_replications(seed.wrapping_add(n as u64), cfg.reps, |rng, _| {
                Ok((0..n).map(|_| signal.sample(rng)).fold(0.0f64, f64::max))
            })?)
        })?;
        let mc = normalize_samples(draws, Normalization::MaxGumbel { c_n: g.c_n, d_n: g.d_n })?;
        let ks = mc.ks_distance(|z| model.normalized_cdf(z).unwrap_or(f64::NAN));
        manifest.notes.push(format!("n = {n}: KS(model, simulated) = {ks:.5}"));
        for &z in &zs {
            rows.push(vec![n.to_string(), num(z), num(model.normalized_cdf(z)?), num(mc.cdf(z)), num(gumbel_cdf(z))]);
        }
    }
    let path = out.join("mda_cdf.csv");
    write_csv(&path, &["n", "z", "model_cdf", "mc_cdf", "gumbel_cdf"], &rows)?;
    manifest.record(&path);
    Ok(())
}

fn mda_jsdiv(cfg: &Config, out: &Path, manifest: &mut RunManifest) -> anyhow::Result<()> {
    let edges = z_grid(0.1);
    let mut rows = Vec::new();
    manifest.timed("mda_jsdiv", || {
        for sigma_db in JS_SIGMAS_DB {
            let signal = Config { sigma_db, ..cfg.clone() }.signal()?;
            for n in JS_SIZES {
                let js = MaxStrengthModel::new(n, signal)?.js_to_gumbel(&edges)?;
                rows.push(vec![num(sigma_db), n.to_string(), num(js)]);
            }
        }
        Ok(())
    })?;
    let path = out.join("mda_jsdiv.csv");
    write_csv(&path, &["sigma_db", "n", "js"], &rows)?;
    manifest.record(&path);
    Ok(())
}

fn scanned(
    cfg: &Config,
    sampler: &FieldSampler,
    n: usize,
    seed: u64,
) -> anyhow::Result<Vec<maxsinr_core::montecarlo::RealizationMetrics>> {
    Ok(run_replications(seed, cfg.reps, |rng, _| Ok(sampler.realize_metrics(&sampler.sample(rng, n)?)))?)
}

fn joint_density(cfg: &Config, seed: u64, out: &Path, manifest: &mut RunManifest) -> anyhow::Result<()> {
    let sampler = FieldSampler::new(cfg.field()?, cfg.geometry()?)?;
    let signal: SignalStrength = cfg.signal()?;
    let g = MaxStrengthModel::new(JOINT_N, signal)?.normalization()?;
    let metrics = manifest.timed("simulate", || scanned(cfg, &sampler, JOINT_N, seed))?;
    let root_n = (JOINT_N as f64).sqrt();
    let ms: Vec<f64> = metrics.iter().map(|m| (m.m_n - g.d_n) / g.c_n).collect();
    let is: Vec<f64> =
        metrics.iter().map(|m| (m.i_n - JOINT_N as f64 * signal.mean()) / (root_n * signal.std_dev())).collect();
    let h = Histogram2D::from_samples(&ms, &is, None)?;
    let diag = independence_diagnostic(&h)?;
    manifest.notes.push(format!("n = {JOINT_N}: JS(joint, product of marginals) = {:.5}", diag.js));
    if let Some(w) = &diag.warning {
        manifest.notes.push(w.clone());
    }
    let (nx, ny) = h.shape();
    let total = h.total();
    let mut px = vec![0.0; nx];
    let mut py = vec![0.0; ny];
    for i in 0..nx {
        for j in 0..ny {
            px[i] += h.counts[i * ny + j] / total;
            py[j] += h.counts[i * ny + j] / total;
        }
    }
    let mut rows = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            rows.push(vec![
                i.to_string(),
                j.to_string(),
                num(h.edges_x[i]),
                num(h.edges_x[i + 1]),
                num(h.edges_y[j]),
                num(h.edges_y[j + 1]),
                num(h.counts[i * ny + j] / total),
                num(px[i] * py[j]),
            ]);
        }
    }
    let path = out.join("joint_density.csv");
    write_csv(&path, &["ix", "iy", "m_lo", "m_hi", "i_lo", "i_hi", "joint", "product"], &rows)?;
    manifest.record(&path);

    let samples: Vec<Vec<String>> = metrics
        .iter()
        .enumerate()
        .map(|(k, m)| vec![k.to_string(), num(m.m_n), num(m.i_n), num(m.i_total), num(m.y_n)])
        .collect();
    let path = out.join(format!("samples_n{JOINT_N}.csv"));
    write_csv(&path, &["rep_id", "m_n", "i_n", "i_total", "y_n"], &samples)?;
    manifest.record(&path);
    Ok(())
}

fn indep_jsdiv(cfg: &Config, seed: u64, out: &Path, manifest: &mut RunManifest) -> anyhow::Result<()> {
    let sampler = FieldSampler::new(cfg.field()?, cfg.geometry()?)?;
    let mut rows = Vec::new();
    for n in INDEP_SIZES.into_iter().filter(|&n| n <= cfg.n_max) {
        let metrics = manifest.timed(&format!("indep_n{n}"), || scanned(cfg, &sampler, n, seed.wrapping_add(n as u64)))?;
        let (ms, is): (Vec<f64>, Vec<f64>) = metrics.iter().map(|m| (m.m_n, m.i_n)).unzip();
        let d = independence_diagnostic(&Histogram2D::from_samples(&ms, &is, None)?)?;
        if let Some(w) = d.warning {
            manifest.notes.push(format!("n = {n}: {w}"));
        }
        rows.push(vec![n.to_string(), num(d.js), num(d.total)]);
    }
    let path = out.join("indep_jsdiv.csv");
    write_csv(&path, &["n", "js", "total"], &rows)?;
    manifest.record(&path);
    Ok(())
}

fn scan_curves(cfg: &Config, seed: u64, out: &Path, manifest: &mut RunManifest) -> anyhow::Result<()> {
    let timing = cfg.timing()?;
    let model = manifest.timed("model_curve", || model_curve(cfg))?;
    let field = cfg.field()?;
    let geometry = cfg.geometry()?;
    let sim = manifest.timed("simulated_curve", || {
        Ok(throughput_curve_mc(&field, &geometry, cfg.n_max, cfg.bandwidth_hz, cfg.reps, seed)?)
    })?;
    let pm = optimal_scan_count(&timing, &model, cfg.delta_g)?;
    let ps = optimal_scan_count(&timing, &sim.curve, cfg.delta_g)?;
    manifest.notes.push(format!("model n_star = {}, simulated n_star = {}", pm.n_star, ps.n_star));
    let rows: Vec<Vec<String>> = (0..cfg.n_max)
        .map(|k| {
            vec![
                (k + 1).to_string(),
                num(model.xi_values[k]),
                num(sim.curve.xi_values[k]),
                num(sim.std_err[k]),
                num(pm.curves[k].rho),
                num(ps.curves[k].rho),
                num(pm.curves[k].g),
                num(ps.curves[k].g),
            ]
        })
        .collect();
    let path = out.join("scan_curves.csv");
    write_csv(
        &path,
        &["n", "E_xi_model", "E_xi_mc", "E_xi_mc_se", "rho_model", "rho_mc", "g_model", "g_mc"],
        &rows,
    )?;
    manifest.record(&path);
    Ok(())
}
