use std::path::Path;

use maxsinr_core::best_signal::{QuadConfig, ThroughputCurve, ThroughputModel};
use maxsinr_core::interference::{delta_constant, StableLaw};
use maxsinr_core::scan::optimal_scan_count;

use crate::config::Config;
use crate::manifest::{ensure_dir, RunManifest};

/// Analytical throughput for scan sizes `1..=n_max`.
pub fn model_curve(cfg: &Config) -> anyhow::Result<ThroughputCurve> {
    let law = StableLaw::new(delta_constant(&cfg.field()?)?)?;
    let model = ThroughputModel::new(cfg.signal()?, law, QuadConfig::default())?;
    Ok(model.curve(&(1..=cfg.n_max).collect::<Vec<_>>(), cfg.bandwidth_hz)?)
}

pub fn run(cfg: &Config, out: Option<&Path>) -> anyhow::Result<()> {
    let mut manifest = RunManifest::new("plan", cfg);
    let curve = manifest.timed("model_curve", || model_curve(cfg))?;
    let mut plan = optimal_scan_count(&cfg.timing()?, &curve, cfg.delta_g)?;
    plan.config_hash = Some(cfg.hash());
    let json = serde_json::to_string_pretty(&plan)?;
    println!("{json}");
    if !plan.feasible {
        eprintln!("note: no scan size meets g_n >= 1 + delta_g; falling back to n = 1");
    }
    if let Some(dir) = out {
        ensure_dir(dir)?;
        let path = dir.join("plan.json");
        std::fs::write(&path, json + "\n")?;
        manifest.record(&path);
        manifest.write(dir)?;
    }
    Ok(())
}
