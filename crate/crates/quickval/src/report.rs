//! Run manifests and plot-ready CSV/JSON output.
//!
//! Sample CSVs and summary JSON are byte-deterministic for a fixed
//! configuration and master seed; only manifest timestamps vary between
//! reruns.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::Result;

pub fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Everything needed to re-execute a run bit-exactly, plus timing and the
/// per-run error counters.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// Effective merged configuration (flags over file over defaults).
    pub config: BTreeMap<String, String>,
    pub rng_master_seed: u64,
    pub code_version: String,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    /// Replications redrawn because a pivot hit alpha exactly.
    pub redraws: usize,
    /// Replications redrawn because a truncation cap was exceeded.
    pub truncation_redraws: usize,
}

impl RunManifest {
    pub fn start(command: impl Into<String>, config: BTreeMap<String, String>, seed: u64) -> Self {
        RunManifest {
            command: command.into(),
            config,
            rng_master_seed: seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix_s: now_unix(),
            finished_unix_s: 0.0,
            redraws: 0,
            truncation_redraws: 0,
        }
    }

    pub fn finish(&mut self) {
        self.finished_unix_s = now_unix();
    }
}

/// Write named sample columns as CSV, one row per sample; shorter columns
/// leave trailing cells empty. Floats use Rust's shortest round-trip
/// formatting, so identical values always produce identical bytes.
pub fn write_samples_csv(path: &Path, columns: &[(String, Vec<f64>)]) -> Result<()> {
    let mut out = String::new();
    let names: Vec<&str> = columns.iter().map(|(n, _)| n.as_str()).collect();
    out.push_str(&names.join(","));
    out.push('\n');
    let rows = columns.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
    for r in 0..rows {
        for (idx, (_, col)) in columns.iter().enumerate() {
            if idx > 0 {
                out.push(',');
            }
            if let Some(v) = col.get(r) {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    let text = serde_json::to_string_pretty(value)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_padding() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        write_samples_csv(
            &path,
            &[
                ("n=2".to_string(), vec![1.5, 2.5, 3.5]),
                ("mixture".to_string(), vec![0.25]),
            ],
        )
        .unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "n=2,mixture\n1.5,0.25\n2.5,\n3.5,\n");
    }
}
