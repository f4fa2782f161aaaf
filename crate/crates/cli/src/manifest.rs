//! Run manifest written next to every set of outputs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

use crate::config::Config;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub config: Config,
    /// Wall-clock seconds per experiment.
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, cfg: &Config) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            config_hash: cfg.hash(),
            config: cfg.clone(),
            timings: BTreeMap::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Run `f` and record its duration under `name`.
    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> anyhow::Result<T>) -> anyhow::Result<T> {
        let start = Instant::now();
        let out = f()?;
        self.timings.insert(name.to_string(), start.elapsed().as_secs_f64());
        Ok(out)
    }

    pub fn record(&mut self, path: &Path) {
        self.outputs.push(path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default());
    }

    pub fn write(mut self, dir: &Path) -> anyhow::Result<PathBuf> {
        let path = dir.join("manifest.json");
        self.outputs.push("manifest.json".to_string());
        fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

pub fn ensure_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Write a CSV with a header row; numbers use the shortest round-trip form.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
