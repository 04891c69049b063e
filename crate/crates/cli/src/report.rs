//! Recomputes kernel diagnostics from a run's exported snapshot CSVs, so
//! plots can be rebuilt from artifacts alone.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pirbn_core::linalg::Mat;
use pirbn_core::ntk;
use serde::{Deserialize, Serialize};

use crate::artifacts::{read_kernel, write_csv, write_json, KernelMeta};

/// Everything `ntk-report` derives, one entry per snapshot in iteration
/// order.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub snapshots: Vec<KernelMeta>,
}

fn snapshot_iterations(dir: &Path) -> Result<Vec<u64>> {
    let mut iters = Vec::new();
    let entries =
        fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?;
    for entry in entries {
        let name = entry?.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(stem) = name.strip_prefix("ntk_").and_then(|s| s.strip_suffix(".csv")) {
            if let Ok(iter) = stem.parse::<u64>() {
                iters.push(iter);
            }
        }
    }
    iters.sort_unstable();
    anyhow::ensure!(
        !iters.is_empty(),
        "no kernel snapshots (ntk_<iteration>.csv) under {}",
        dir.display()
    );
    Ok(iters)
}

/// Reads every `ntk_<iteration>.csv` under `dir`, re-derives the snapshot
/// diagnostics, and writes `normalized_<iteration>.csv` plus `report.json`.
pub fn generate(dir: &Path) -> Result<Report> {
    let iters = snapshot_iterations(dir)?;
    let kernels: Vec<(u64, Mat)> = iters
        .iter()
        .map(|&iter| Ok((iter, read_kernel(&dir.join(format!("ntk_{iter}.csv")))?)))
        .collect::<Result<_>>()?;

    let first = &kernels[0].1;
    let mut snapshots = Vec::with_capacity(kernels.len());
    for (iter, kernel) in &kernels {
        let normalized = ntk::normalize(kernel)?;
        let header: Vec<String> = (0..normalized.cols).map(|j| format!("c{j}")).collect();
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<f64>> = (0..normalized.rows).map(|i| normalized.row(i).to_vec()).collect();
        write_csv(&dir.join(format!("normalized_{iter}.csv")), &header_refs, &rows)?;

        let spectral = ntk::spectral(kernel)?;
        snapshots.push(KernelMeta {
            iteration: *iter,
            rows: kernel.rows,
            diag_dominance: ntk::diag_dominance(&normalized),
            drift_from_first: ntk::drift(first, kernel)?,
            top_eigenvalues: spectral.eigenvalues.iter().take(10).copied().collect(),
        });
    }

    let report = Report { snapshots };
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}
