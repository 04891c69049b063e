//! Experiment configuration: one JSON document describes one reproducible
//! run set (a problem, a model family, a training schedule, and seeds).

use std::path::PathBuf;

use pirbn_core::problems::{ProblemId, Resolution};
use pirbn_core::rbf::RbfKind;
use pirbn_core::train::TrainConfig;
use serde::{Deserialize, Serialize};

/// Network architecture instantiated once per field of the problem. Multi
/// field problems reuse the spec with a distinct seed per field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Radial basis network with centers on a uniform grid spanning
    /// `centers[axis]` with `counts[axis]` nodes per axis.
    Pirbn {
        kind: RbfKind,
        centers: Vec<(f64, f64)>,
        counts: Vec<usize>,
        b0: f64,
    },
    /// Radial basis network with `count` centers drawn uniformly at random
    /// from the box `centers`.
    PirbnRandom {
        kind: RbfKind,
        centers: Vec<(f64, f64)>,
        count: usize,
        b0: f64,
    },
    /// Fully connected tanh network; `widths` lists every layer including
    /// input and output.
    Fnn { widths: Vec<usize> },
}

/// Pass/fail thresholds evaluated only when `--gate` is passed. Every listed
/// check must hold for every completed run; a diverged run fails the gate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    /// Upper bound on the maximum absolute error of every field.
    #[serde(default)]
    pub max_abs_error: Option<f64>,
    /// Upper bound on the mean absolute error of every field.
    #[serde(default)]
    pub mae: Option<f64>,
    /// Required inclusive range for the final governing loss divided by the
    /// number of interior points. Used to assert documented failure modes.
    #[serde(default)]
    pub loss_g_per_point_range: Option<(f64, f64)>,
}

/// Axis varied by the `sweep` subcommand; every other setting is shared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    B0,
    LearningRate,
    RbfKind,
    Samples,
}

/// Sweep section: the axis and its values. Values are JSON scalars
/// interpreted per axis (numbers, or RBF kind names for `rbf_kind`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<serde_json::Value>,
}

/// A full experiment description as read from a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    /// Interior collocation counts overriding the problem defaults.
    #[serde(default)]
    pub resolution: Option<Resolution>,
    pub model: ModelSpec,
    pub train: TrainConfig,
    /// Explicit seed list; mutually exclusive with `repeat`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Shorthand for seeds `0..repeat`.
    #[serde(default)]
    pub repeat: Option<u64>,
    /// Output directory. The `--out` flag wins over this; with neither, the
    /// `PIRBN_OUT` environment variable (or `runs/`) plus the config file
    /// stem is used.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub gate: Option<GateSpec>,
    /// Present only in sweep configs.
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    /// The resolved seed list: explicit `seeds`, `0..repeat`, or `[0]`.
    pub fn seed_list(&self) -> Result<Vec<u64>, String> {
        match (&self.seeds, self.repeat) {
            (Some(_), Some(_)) => Err("config sets both `seeds` and `repeat`".into()),
            (Some(s), None) if s.is_empty() => Err("`seeds` must not be empty".into()),
            (Some(s), None) => Ok(s.clone()),
            (None, Some(0)) => Err("`repeat` must be positive".into()),
            (None, Some(n)) => Ok((0..n).collect()),
            (None, None) => Ok(vec![0]),
        }
    }
}

/// Spatial dimension of a problem's collocation grid.
pub fn problem_dims(id: ProblemId) -> usize {
    match id {
        ProblemId::Poisson1D { .. } | ProblemId::MixedFreq1D | ProblemId::Spring1D => 1,
        ProblemId::Wave2D | ProblemId::Diffusion2D | ProblemId::UcmPoiseuille => 2,
    }
}

/// The config-file name of a problem.
pub fn problem_name(id: ProblemId) -> &'static str {
    match id {
        ProblemId::Poisson1D { .. } => "poisson1d",
        ProblemId::MixedFreq1D => "mixed_freq1d",
        ProblemId::Spring1D => "spring1d",
        ProblemId::Wave2D => "wave2d",
        ProblemId::Diffusion2D => "diffusion2d",
        ProblemId::UcmPoiseuille => "ucm_poiseuille",
    }
}

/// Applies one sweep value to a member config and returns the member's
/// directory label.
pub fn apply_axis(
    cfg: &mut ExperimentConfig,
    axis: SweepAxis,
    value: &serde_json::Value,
) -> Result<String, String> {
    match axis {
        SweepAxis::B0 => {
            let x = value
                .as_f64()
                .ok_or_else(|| "`b0` sweep values must be numbers".to_string())?;
            match &mut cfg.model {
                ModelSpec::Pirbn { b0, .. } | ModelSpec::PirbnRandom { b0, .. } => *b0 = x,
                ModelSpec::Fnn { .. } => return Err("`b0` sweep requires a PIRBN model".into()),
            }
            Ok(format!("b0_{x}"))
        }
        SweepAxis::LearningRate => {
            let x = value
                .as_f64()
                .ok_or_else(|| "`learning_rate` sweep values must be numbers".to_string())?;
            cfg.train.learning_rate = x;
            Ok(format!("lr_{x:e}"))
        }
        SweepAxis::RbfKind => {
            let kind: RbfKind = serde_json::from_value(value.clone())
                .map_err(|_| format!("unknown RBF kind {value}"))?;
            match &mut cfg.model {
                ModelSpec::Pirbn { kind: k, .. } | ModelSpec::PirbnRandom { kind: k, .. } => {
                    *k = kind
                }
                ModelSpec::Fnn { .. } => {
                    return Err("`rbf_kind` sweep requires a PIRBN model".into())
                }
            }
            Ok(format!(
                "rbf_{}",
                value.as_str().expect("validated as a kind name")
            ))
        }
        SweepAxis::Samples => {
            let n = value
                .as_u64()
                .ok_or_else(|| "`samples` sweep values must be positive integers".to_string())?;
            if n < 2 {
                return Err("`samples` values must be at least 2".into());
            }
            cfg.resolution = Some(Resolution {
                interior: vec![n as usize; problem_dims(cfg.problem)],
            });
            Ok(format!("samples_{n}"))
        }
    }
}

/// Parses a problem name as used in configs; parameterised problems get
/// their default parameters.
pub fn parse_problem(name: &str) -> Result<ProblemId, String> {
    serde_json::from_value(serde_json::json!({ "name": name })).map_err(|_| {
        format!(
            "unknown problem `{name}` (expected poisson1d, mixed_freq1d, spring1d, \
             wave2d, diffusion2d, or ucm_poiseuille)"
        )
    })
}
