//! Artifact writers and readers: CSV with lossless floats, JSON metadata,
//! and the run manifest.
//!
//! Every artifact except `manifest.json` is byte-reproducible under a fixed
//! config; the manifest carries the two intentionally volatile records (the
//! timestamp and wall-clock timings).

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pirbn_core::linalg::Mat;
use pirbn_core::train::TrainLog;
use serde::{Deserialize, Serialize};

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV file with a header row; every cell goes through [`fmt_f64`].
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * header.len() * 24 + 64);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for &cell in row {
            if !first {
                out.push(',');
            }
            out.push_str(&fmt_f64(cell));
            first = false;
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Writes pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// 64-bit FNV-1a hash of the raw config bytes, hex-encoded in the manifest.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Final metrics of one run, or the recorded divergence outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Metrics {
    Ok {
        iterations: u64,
        /// Mean absolute error per field on the dense metric grid.
        mae: Vec<f64>,
        /// Maximum absolute error per field on the dense metric grid.
        max_abs_error: Vec<f64>,
        loss_g: f64,
        loss_b: f64,
        /// `loss_g` divided by the interior point count.
        loss_g_per_point: f64,
        w_g: f64,
        w_b: f64,
    },
    Diverged {
        iterations: u64,
        diverged_at: u64,
    },
}

/// Provenance record written last into every run directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    /// FNV-1a of the config file bytes, before any sweep value was applied.
    pub config_hash: String,
    pub version: String,
    /// Seconds since the Unix epoch at write time. Not reproducible.
    pub timestamp_epoch_secs: u64,
    /// Wall-clock milliseconds per 1000 iterations. Not reproducible.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wall_ms_per_1000: Vec<f64>,
}

impl Manifest {
    pub fn new(config_hash: u64, wall_ms_per_1000: Vec<f64>) -> Self {
        let timestamp_epoch_secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Manifest {
            config_hash: format!("{config_hash:016x}"),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_epoch_secs,
            wall_ms_per_1000,
        }
    }
}

/// Per-snapshot kernel diagnostics, stored beside the raw kernel CSV and
/// recomputed from it by `ntk-report`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelMeta {
    pub iteration: u64,
    pub rows: usize,
    /// One minus the mean absolute off-diagonal of the normalized kernel.
    pub diag_dominance: f64,
    /// Spectral-norm distance from the earliest snapshot's raw kernel.
    pub drift_from_first: f64,
    /// Largest eigenvalues of the raw kernel, descending, at most ten.
    pub top_eigenvalues: Vec<f64>,
}

/// Writes `loss_history.csv`: one row per logged iteration including the
/// initial state, with the total loss under the logged weights.
pub fn write_loss_history(path: &Path, log: &TrainLog) -> Result<()> {
    let rows: Vec<Vec<f64>> = (0..log.loss_g.len())
        .map(|i| {
            let (lg, lb) = (log.loss_g[i], log.loss_b[i]);
            let (wg, wb) = (log.w_g[i], log.w_b[i]);
            vec![i as f64, wg * lg + wb * lb, lg, lb, wg, wb]
        })
        .collect();
    write_csv(
        path,
        &["iteration", "loss", "loss_g", "loss_b", "w_g", "w_b"],
        &rows,
    )
}

/// Writes a raw kernel matrix as CSV with generic column labels.
pub fn write_kernel(path: &Path, k: &Mat) -> Result<()> {
    let header: Vec<String> = (0..k.cols).map(|j| format!("c{j}")).collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = (0..k.rows).map(|i| k.row(i).to_vec()).collect();
    write_csv(path, &header_refs, &rows)
}

/// Reads a kernel CSV written by [`write_kernel`] back into a matrix.
pub fn read_kernel(path: &Path) -> Result<Mat> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .with_context(|| format!("{}: empty kernel file", path.display()))?;
    let cols = header.split(',').count();
    let mut data = Vec::new();
    let mut rows = 0;
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .with_context(|| format!("{}: bad float on data row {n}", path.display()))?;
            data.push(v);
        }
        rows += 1;
    }
    anyhow::ensure!(
        data.len() == rows * cols,
        "{}: ragged kernel rows",
        path.display()
    );
    Ok(Mat { rows, cols, data })
}
