//! Command-line experiment runner: reproduces every benchmark as an
//! artifact directory of CSV/JSON files ready for external plotting.
//!
//! Exit codes: 0 success, 2 config or input error, 3 training diverged,
//! 4 gate thresholds not met (only with `--gate`).

mod artifacts;
mod config;
mod report;
mod runner;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use pirbn_core::oracle;
use pirbn_core::problems::{build_problem, ProblemId};

use crate::artifacts::{fnv1a, write_json, Manifest};
use crate::config::ExperimentConfig;
use crate::runner::{gate_passes, RunOutcome, RunRequest, RunStatus};

const EXIT_CONFIG: i32 = 2;
const EXIT_DIVERGED: i32 = 3;
const EXIT_GATE: i32 = 4;

#[derive(Parser)]
#[command(
    name = "pirbn",
    version,
    about = "Physics-informed radial basis network experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and export its artifact directory.
    Run {
        /// Path to a JSON experiment config.
        config: PathBuf,
        /// Output directory, overriding the config and `PIRBN_OUT`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate the config's gate thresholds; failure exits with 4.
        #[arg(long)]
        gate: bool,
        /// Concurrent runs for multi-seed configs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run one training per sweep-axis value and write a summary table.
    Sweep {
        /// Path to a JSON experiment config with a `sweep` section.
        config: PathBuf,
        /// Output directory, overriding the config and `PIRBN_OUT`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate the config's gate per sweep member; any failure exits 4.
        #[arg(long)]
        gate: bool,
        /// Concurrent sweep members.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Recompute kernel diagnostics from a run's exported snapshots.
    NtkReport {
        /// Artifact directory containing `ntk_<iteration>.csv` files.
        dir: PathBuf,
    },
    /// Check the analytical solutions against their differential operators.
    OracleCheck {
        /// Problem name; all problems when omitted.
        problem: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            out,
            gate,
            jobs,
        } => cmd_run(&config, out, gate, jobs),
        Command::Sweep {
            config,
            out,
            gate,
            jobs,
        } => cmd_sweep(&config, out, gate, jobs),
        Command::NtkReport { dir } => cmd_ntk_report(&dir),
        Command::OracleCheck { problem } => cmd_oracle_check(problem.as_deref()),
    };
    std::process::exit(code);
}

fn load_config(path: &Path) -> Result<(ExperimentConfig, u64)> {
    let bytes = fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg: ExperimentConfig = serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing config {}", path.display()))?;
    Ok((cfg, fnv1a(&bytes)))
}

/// Output directory precedence: `--out`, then the config's `output`, then
/// `$PIRBN_OUT/<config stem>`, then `runs/<config stem>`.
fn resolve_out(config_path: &Path, flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = flag {
        return dir;
    }
    if let Some(dir) = &cfg.output {
        return dir.clone();
    }
    let stem = config_path
        .file_stem()
        .map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned());
    let root = std::env::var_os("PIRBN_OUT").map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    root.join(stem)
}

fn print_outcome(outcome: &RunOutcome) {
    match outcome.status {
        RunStatus::Ok => {
            let fmt = |v: &[f64]| {
                v.iter()
                    .map(|x| format!("{x:.3e}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            println!(
                "{}: mae {} max {} loss_g {:.3e} loss_b {:.3e}",
                outcome.label,
                fmt(&outcome.mae),
                fmt(&outcome.max_err),
                outcome.loss_g,
                outcome.loss_b,
            );
        }
        RunStatus::Diverged { at } => {
            println!("{}: diverged at iteration {at}", outcome.label);
        }
    }
}

fn cmd_run(config_path: &Path, out: Option<PathBuf>, gate: bool, jobs: usize) -> i32 {
    let (cfg, hash) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e:#}");
            return EXIT_CONFIG;
        }
    };
    if cfg.sweep.is_some() {
        eprintln!("config has a `sweep` section; use `pirbn sweep`");
        return EXIT_CONFIG;
    }
    if gate && cfg.gate.is_none() {
        eprintln!("--gate passed but the config has no `gate` section");
        return EXIT_CONFIG;
    }
    let seeds = match cfg.seed_list() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let fields = match build_problem(cfg.problem, cfg.resolution.as_ref()) {
        Ok(p) => p.families(),
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };

    let root = resolve_out(config_path, out, &cfg);
    let multi = seeds.len() > 1;
    let requests: Vec<RunRequest> = seeds
        .iter()
        .map(|&seed| RunRequest {
            config: cfg.clone(),
            config_hash: hash,
            dir: if multi {
                root.join(format!("seed_{seed}"))
            } else {
                root.clone()
            },
            label: format!("seed_{seed}"),
            seed,
        })
        .collect();

    let outcomes = match runner::execute_all(&requests, jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e:#}");
            return 1;
        }
    };
    for outcome in &outcomes {
        print_outcome(outcome);
    }
    if multi {
        let finish = (|| -> Result<()> {
            runner::write_summary(&root.join("summary.csv"), &outcomes, fields, cfg.gate.as_ref())?;
            write_json(
                &root.join("stats.json"),
                &runner::compute_stats(&outcomes, fields),
            )?;
            write_json(&root.join("manifest.json"), &Manifest::new(hash, vec![]))
        })();
        if let Err(e) = finish {
            eprintln!("{e:#}");
            return 1;
        }
    }

    if outcomes.iter().any(|o| o.status != RunStatus::Ok) {
        return EXIT_DIVERGED;
    }
    if gate {
        let spec = cfg.gate.as_ref().expect("gate presence checked above");
        if !outcomes.iter().all(|o| gate_passes(spec, o)) {
            eprintln!("gate thresholds not met");
            return EXIT_GATE;
        }
    }
    0
}

fn cmd_sweep(config_path: &Path, out: Option<PathBuf>, gate: bool, jobs: usize) -> i32 {
    let (cfg, hash) = match load_config(config_path) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e:#}");
            return EXIT_CONFIG;
        }
    };
    let Some(sweep) = cfg.sweep.clone() else {
        eprintln!("config has no `sweep` section; use `pirbn run`");
        return EXIT_CONFIG;
    };
    if sweep.values.is_empty() {
        eprintln!("`sweep.values` must not be empty");
        return EXIT_CONFIG;
    }
    if gate && cfg.gate.is_none() {
        eprintln!("--gate passed but the config has no `gate` section");
        return EXIT_CONFIG;
    }
    let seed = match cfg.seed_list() {
        Ok(s) => s[0],
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };
    let fields = match build_problem(cfg.problem, cfg.resolution.as_ref()) {
        Ok(p) => p.families(),
        Err(e) => {
            eprintln!("{e}");
            return EXIT_CONFIG;
        }
    };

    let root = resolve_out(config_path, out, &cfg);
    let mut requests = Vec::with_capacity(sweep.values.len());
    for value in &sweep.values {
        let mut member = cfg.clone();
        member.sweep = None;
        let label = match config::apply_axis(&mut member, sweep.axis, value) {
            Ok(l) => l,
            Err(e) => {
                eprintln!("{e}");
                return EXIT_CONFIG;
            }
        };
        requests.push(RunRequest {
            config: member,
            config_hash: hash,
            dir: root.join(&label),
            label,
            seed,
        });
    }

    let outcomes = match runner::execute_all(&requests, jobs) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e:#}");
            return 1;
        }
    };
    for outcome in &outcomes {
        print_outcome(outcome);
    }
    let finish = (|| -> Result<()> {
        runner::write_summary(&root.join("summary.csv"), &outcomes, fields, cfg.gate.as_ref())?;
        write_json(&root.join("manifest.json"), &Manifest::new(hash, vec![]))
    })();
    if let Err(e) = finish {
        eprintln!("{e:#}");
        return 1;
    }

    if outcomes.iter().all(|o| o.status != RunStatus::Ok) {
        return EXIT_DIVERGED;
    }
    if gate {
        let spec = cfg.gate.as_ref().expect("gate presence checked above");
        if !outcomes.iter().all(|o| gate_passes(spec, o)) {
            eprintln!("gate thresholds not met for at least one sweep member");
            return EXIT_GATE;
        }
    }
    0
}

fn cmd_ntk_report(dir: &Path) -> i32 {
    match report::generate(dir) {
        Ok(report) => {
            for snap in &report.snapshots {
                println!(
                    "iteration {}: diag_dominance {:.4} drift_from_first {:.3e} lambda_max {:.3e}",
                    snap.iteration,
                    snap.diag_dominance,
                    snap.drift_from_first,
                    snap.top_eigenvalues.first().copied().unwrap_or(f64::NAN),
                );
            }
            0
        }
        Err(e) => {
            eprintln!("{e:#}");
            EXIT_CONFIG
        }
    }
}

fn cmd_oracle_check(problem: Option<&str>) -> i32 {
    let ids = match problem {
        Some(name) => match config::parse_problem(name) {
            Ok(id) => vec![id],
            Err(e) => {
                eprintln!("{e}");
                return EXIT_CONFIG;
            }
        },
        None => vec![
            ProblemId::Poisson1D {
                mu: 1.0,
                shift: 0.0,
            },
            ProblemId::MixedFreq1D,
            ProblemId::Spring1D,
            ProblemId::Wave2D,
            ProblemId::Diffusion2D,
            ProblemId::UcmPoiseuille,
        ],
    };
    println!(
        "{:<16} {:>12} {:>11}  status",
        "problem", "max_rel", "tolerance"
    );
    let mut all_passed = true;
    for id in ids {
        let check = oracle::oracle_selfcheck(id);
        all_passed &= check.passed;
        println!(
            "{:<16} {:>12.3e} {:>11.1e}  {}",
            config::problem_name(id),
            check.max_rel_residual,
            check.tolerance,
            if check.passed { "pass" } else { "FAIL" },
        );
    }
    if all_passed {
        0
    } else {
        1
    }
}
