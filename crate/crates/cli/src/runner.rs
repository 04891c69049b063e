//! Executes configured runs, exports their artifacts, and aggregates
//! multi-run summaries.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use pirbn_core::model::{init_fnn, init_pirbn, init_pirbn_random_centers, CenterGrid, Network};
use pirbn_core::ntk;
use pirbn_core::oracle;
use pirbn_core::problems::{build_problem, Problem};
use pirbn_core::train::train;

use crate::artifacts::{
    fmt_f64, write_csv, write_json, write_kernel, KernelMeta, Manifest, Metrics,
};
use crate::config::{ExperimentConfig, GateSpec, ModelSpec};

/// One fully resolved run: a config with any sweep value already applied,
/// one seed, and an exclusively owned output directory.
pub struct RunRequest {
    pub config: ExperimentConfig,
    pub config_hash: u64,
    pub dir: PathBuf,
    pub label: String,
    pub seed: u64,
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunStatus {
    Ok,
    Diverged { at: u64 },
}

/// Summary numbers of one finished run; error fields are empty and losses
/// NaN when the run diverged.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub label: String,
    pub seed: u64,
    pub status: RunStatus,
    pub initial_mae: Vec<f64>,
    pub mae: Vec<f64>,
    pub max_err: Vec<f64>,
    pub loss_g: f64,
    pub loss_b: f64,
    pub loss_g_per_point: f64,
}

impl RunOutcome {
    /// True when any field's final MAE failed to halve its initial MAE, the
    /// marker used to flag stagnant configurations in sweep tables.
    pub fn mae_flat(&self) -> bool {
        self.mae
            .iter()
            .zip(&self.initial_mae)
            .any(|(&last, &first)| last >= 0.5 * first)
    }
}

/// Instantiates one network per field; field `k` of seed `s` uses stream
/// `s * fields + k` so repeats never share draws across fields.
pub fn build_networks(spec: &ModelSpec, fields: usize, seed: u64) -> Result<Vec<Network>> {
    (0..fields)
        .map(|k| {
            let s = seed * fields as u64 + k as u64;
            let net = match spec {
                ModelSpec::Pirbn {
                    kind,
                    centers,
                    counts,
                    b0,
                } => {
                    let grid = CenterGrid::new(centers.clone(), counts.clone())?;
                    Network::Pirbn(init_pirbn(*kind, &grid, *b0, s)?)
                }
                ModelSpec::PirbnRandom {
                    kind,
                    centers,
                    count,
                    b0,
                } => Network::Pirbn(init_pirbn_random_centers(*kind, centers, *count, *b0, s)?),
                ModelSpec::Fnn { widths } => Network::Fnn(init_fnn(widths, s)?),
            };
            Ok(net)
        })
        .collect()
}

fn write_fields_csv(path: &Path, problem: &Problem, nets: &[Network]) -> Result<()> {
    let dims = problem.counts.len();
    let mut header: Vec<String> = (0..dims).map(|a| format!("x_{a}")).collect();
    for f in 0..nets.len() {
        header.push(format!("pred_{f}"));
        header.push(format!("exact_{f}"));
        header.push(format!("abs_error_{f}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for x in problem.metric_points() {
        let exact = oracle::exact_fields(problem.id, &x);
        let mut row = x.clone();
        for (f, net) in nets.iter().enumerate() {
            let pred = net.forward(&x)?;
            row.push(pred);
            row.push(exact[f]);
            row.push((pred - exact[f]).abs());
        }
        rows.push(row);
    }
    write_csv(path, &header_refs, &rows)
}

/// Runs one request to completion and writes its artifact directory.
/// Divergence is a recorded outcome, not an error.
pub fn execute(req: &RunRequest) -> Result<RunOutcome> {
    fs::create_dir_all(&req.dir).with_context(|| format!("creating {}", req.dir.display()))?;
    let problem = build_problem(req.config.problem, req.config.resolution.as_ref())?;
    let mut nets = build_networks(&req.config.model, problem.families(), req.seed)?;
    let iterations = req.config.train.iterations;
    let n_g = problem.interior.len() as f64;

    let log = match train(&problem, &mut nets, &req.config.train) {
        Ok(log) => log,
        Err(pirbn_core::Error::Diverged { iteration }) => {
            let at = iteration as u64;
            write_json(
                &req.dir.join("metrics.json"),
                &Metrics::Diverged {
                    iterations,
                    diverged_at: at,
                },
            )?;
            write_json(
                &req.dir.join("manifest.json"),
                &Manifest::new(req.config_hash, vec![]),
            )?;
            return Ok(RunOutcome {
                label: req.label.clone(),
                seed: req.seed,
                status: RunStatus::Diverged { at },
                initial_mae: vec![],
                mae: vec![],
                max_err: vec![],
                loss_g: f64::NAN,
                loss_b: f64::NAN,
                loss_g_per_point: f64::NAN,
            });
        }
        Err(e) => return Err(e.into()),
    };

    write_fields_csv(&req.dir.join("fields.csv"), &problem, &nets)?;
    crate::artifacts::write_loss_history(&req.dir.join("loss_history.csv"), &log)?;
    for cp in &log.checkpoints {
        write_json(&req.dir.join(format!("checkpoint_{}.json", cp.iteration)), cp)?;
    }
    for snap in &log.snapshots {
        write_kernel(&req.dir.join(format!("ntk_{}.csv", snap.iteration)), &snap.kernel)?;
        let normalized = ntk::normalize(&snap.kernel)?;
        let spectral = ntk::spectral(&snap.kernel)?;
        let top = spectral.eigenvalues.iter().take(10).copied().collect();
        let meta = KernelMeta {
            iteration: snap.iteration,
            rows: snap.kernel.rows,
            diag_dominance: ntk::diag_dominance(&normalized),
            drift_from_first: ntk::drift(&log.snapshots[0].kernel, &snap.kernel)?,
            top_eigenvalues: top,
        };
        write_json(&req.dir.join(format!("ntk_{}_meta.json", snap.iteration)), &meta)?;
    }

    let first = &log.checkpoints[0];
    let last = log.checkpoints.last().expect("final checkpoint always present");
    let loss_g = *log.loss_g.last().expect("loss logged");
    let loss_b = *log.loss_b.last().expect("loss logged");
    write_json(
        &req.dir.join("metrics.json"),
        &Metrics::Ok {
            iterations,
            mae: last.mae.clone(),
            max_abs_error: last.max_err.clone(),
            loss_g,
            loss_b,
            loss_g_per_point: loss_g / n_g,
            w_g: *log.w_g.last().expect("weights logged"),
            w_b: *log.w_b.last().expect("weights logged"),
        },
    )?;
    write_json(
        &req.dir.join("manifest.json"),
        &Manifest::new(req.config_hash, log.wall_ms_per_1000.clone()),
    )?;

    Ok(RunOutcome {
        label: req.label.clone(),
        seed: req.seed,
        status: RunStatus::Ok,
        initial_mae: first.mae.clone(),
        mae: last.mae.clone(),
        max_err: last.max_err.clone(),
        loss_g,
        loss_b,
        loss_g_per_point: loss_g / n_g,
    })
}

/// Runs all requests, up to `jobs` at a time. Each artifact directory is
/// owned by exactly one request, so workers never contend on files.
pub fn execute_all(reqs: &[RunRequest], jobs: usize) -> Result<Vec<RunOutcome>> {
    let jobs = jobs.max(1).min(reqs.len().max(1));
    if jobs == 1 {
        return reqs.iter().map(execute).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<RunOutcome>>>> =
        reqs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= reqs.len() {
                    break;
                }
                let result = execute(&reqs[i]);
                *slots[i].lock().expect("result slot poisoned") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("result slot poisoned")
                .expect("worker filled every claimed slot")
        })
        .collect()
}

/// True when `outcome` satisfies every threshold present in `gate`.
pub fn gate_passes(gate: &GateSpec, outcome: &RunOutcome) -> bool {
    if outcome.status != RunStatus::Ok {
        return false;
    }
    let max_ok = gate
        .max_abs_error
        .map_or(true, |g| outcome.max_err.iter().all(|&e| e <= g));
    let mae_ok = gate.mae.map_or(true, |g| outcome.mae.iter().all(|&e| e <= g));
    let loss_ok = gate.loss_g_per_point_range.map_or(true, |(lo, hi)| {
        outcome.loss_g_per_point >= lo && outcome.loss_g_per_point <= hi
    });
    max_ok && mae_ok && loss_ok
}

/// Writes `summary.csv`: one row per run with per-field errors and the
/// stagnant-MAE flag. Diverged runs leave their numeric cells empty.
pub fn write_summary(
    path: &Path,
    outcomes: &[RunOutcome],
    fields: usize,
    gate: Option<&GateSpec>,
) -> Result<()> {
    let mut header = vec!["label".to_string(), "seed".to_string(), "status".to_string()];
    header.push("loss_g".into());
    header.push("loss_b".into());
    for f in 0..fields {
        header.push(format!("mae_{f}"));
        header.push(format!("max_abs_error_{f}"));
    }
    header.push("mae_flat".into());
    if gate.is_some() {
        header.push("gate".into());
    }

    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for o in outcomes {
        let mut cells = vec![o.label.clone(), o.seed.to_string()];
        match o.status {
            RunStatus::Ok => {
                cells.push("ok".into());
                cells.push(fmt_f64(o.loss_g));
                cells.push(fmt_f64(o.loss_b));
                for f in 0..fields {
                    cells.push(fmt_f64(o.mae[f]));
                    cells.push(fmt_f64(o.max_err[f]));
                }
                cells.push(o.mae_flat().to_string());
            }
            RunStatus::Diverged { at } => {
                cells.push(format!("diverged_at_{at}"));
                cells.extend(std::iter::repeat(String::new()).take(2 + 2 * fields + 1));
            }
        }
        if let Some(g) = gate {
            cells.push(if gate_passes(g, o) { "pass" } else { "fail" }.into());
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Per-field mean and sample standard deviation over completed runs,
/// written as `stats.json` for repeat-style statistics tables.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct Stats {
    pub runs: usize,
    pub completed: usize,
    pub mae_mean: Vec<f64>,
    pub mae_std: Vec<f64>,
    pub max_abs_error_mean: Vec<f64>,
    pub max_abs_error_std: Vec<f64>,
    pub loss_g_mean: f64,
    pub loss_b_mean: f64,
}

fn mean_std(samples: &[Vec<f64>], fields: usize) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len();
    let mut mean = vec![0.0; fields];
    let mut std = vec![0.0; fields];
    if n == 0 {
        return (mean, std);
    }
    for s in samples {
        for f in 0..fields {
            mean[f] += s[f];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    if n > 1 {
        for s in samples {
            for f in 0..fields {
                std[f] += (s[f] - mean[f]).powi(2);
            }
        }
        for s in &mut std {
            *s = (*s / (n - 1) as f64).sqrt();
        }
    }
    (mean, std)
}

pub fn compute_stats(outcomes: &[RunOutcome], fields: usize) -> Stats {
    let done: Vec<&RunOutcome> = outcomes
        .iter()
        .filter(|o| o.status == RunStatus::Ok)
        .collect();
    let maes: Vec<Vec<f64>> = done.iter().map(|o| o.mae.clone()).collect();
    let maxes: Vec<Vec<f64>> = done.iter().map(|o| o.max_err.clone()).collect();
    let (mae_mean, mae_std) = mean_std(&maes, fields);
    let (max_abs_error_mean, max_abs_error_std) = mean_std(&maxes, fields);
    let m = done.len().max(1) as f64;
    Stats {
        runs: outcomes.len(),
        completed: done.len(),
        mae_mean,
        mae_std,
        max_abs_error_mean,
        max_abs_error_std,
        loss_g_mean: done.iter().map(|o| o.loss_g).sum::<f64>() / m,
        loss_b_mean: done.iter().map(|o| o.loss_b).sum::<f64>() / m,
    }
}
