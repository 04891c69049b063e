//! Full-batch gradient training with Adam or plain gradient descent,
//! optional trace-balanced loss weights, kernel snapshots, and error
//! checkpoints against the analytical solutions.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::Network;
use crate::ntk;
use crate::oracle;
use crate::problems::{assemble, loss_and_grad, param_offsets, EvalScratch, Problem};
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    #[default]
    Adam,
    Gd,
}

/// Training schedule and optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: u64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default)]
    pub optimizer: Optimizer,
    /// Initial governing-residual loss weight.
    #[serde(default = "default_weight")]
    pub w_g: f64,
    /// Initial boundary loss weight.
    #[serde(default = "default_weight")]
    pub w_b: f64,
    /// Rebalance the loss weights from the kernel block traces every
    /// `adaptive_period` iterations. Off by default.
    #[serde(default)]
    pub adaptive_weights: bool,
    #[serde(default = "default_adaptive_period")]
    pub adaptive_period: u64,
    /// Iterations at which to record a dense kernel snapshot and an error
    /// checkpoint. Entries beyond `iterations` are ignored. Snapshots build
    /// the full residual kernel, so keep this empty for large 2D problems.
    #[serde(default = "default_snapshots")]
    pub snapshot_iters: Vec<u64>,
}

fn default_lr() -> f64 {
    1e-3
}

fn default_weight() -> f64 {
    1.0
}

fn default_adaptive_period() -> u64 {
    1000
}

fn default_snapshots() -> Vec<u64> {
    vec![0, 2000, 20000]
}

impl TrainConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidInput(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        for (name, w) in [("w_g", self.w_g), ("w_b", self.w_b)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {w}"
                )));
            }
        }
        if self.adaptive_period == 0 {
            return Err(Error::InvalidInput("adaptive period must be positive".into()));
        }
        Ok(())
    }
}

/// Raw residual kernel and stacked residual at one training iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSnapshot {
    pub iteration: u64,
    pub kernel: Mat,
    /// `[r_g; r_b]` at the snapshot state.
    pub residual: Vec<f64>,
}

/// Solution error against the analytical oracle on the dense metric grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub iteration: u64,
    /// Mean absolute error per field.
    pub mae: Vec<f64>,
    /// Maximum absolute error per field.
    pub max_err: Vec<f64>,
}

/// Everything recorded over one training run.
///
/// `loss_g`, `loss_b`, `w_g`, and `w_b` have one entry per iteration plus a
/// final entry for the trained state. Wall-clock entries cover consecutive
/// windows of up to 1000 iterations and are the only non-deterministic part.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainLog {
    pub loss_g: Vec<f64>,
    pub loss_b: Vec<f64>,
    pub w_g: Vec<f64>,
    pub w_b: Vec<f64>,
    pub checkpoints: Vec<Checkpoint>,
    pub snapshots: Vec<KernelSnapshot>,
    pub wall_ms_per_1000: Vec<f64>,
}

/// First and second moment accumulators for Adam.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    /// One bias-corrected Adam update of `theta` in place.
    pub fn step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        assert_eq!(theta.len(), grad.len());
        assert_eq!(theta.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for i in 0..theta.len() {
            let g = grad[i];
            self.m[i] = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * g;
            self.v[i] = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            theta[i] -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

/// Plain gradient descent update of `theta` in place.
pub fn gd_step(theta: &mut [f64], grad: &[f64], lr: f64) {
    assert_eq!(theta.len(), grad.len());
    for (t, g) in theta.iter_mut().zip(grad) {
        *t -= lr * g;
    }
}

/// Trace-balanced loss weights: each block is scaled so its kernel trace
/// matches the total, `w_g = tr(K) / tr(K_gg)` and `w_b = tr(K) / tr(K_bb)`.
pub fn trace_balanced_weights(trace_gg: f64, trace_bb: f64) -> Result<(f64, f64)> {
    if trace_gg <= 0.0 || trace_bb <= 0.0 {
        return Err(Error::DegenerateKernel(format!(
            "kernel block traces must be positive to balance weights, got {trace_gg} and {trace_bb}"
        )));
    }
    let total = trace_gg + trace_bb;
    Ok((total / trace_gg, total / trace_bb))
}

fn write_params(nets: &mut [Network], offsets: &[usize], theta: &[f64]) -> Result<()> {
    for (net, &o) in nets.iter_mut().zip(offsets) {
        let count = net.param_count();
        net.set_params(&theta[o..o + count])?;
    }
    Ok(())
}

/// Mean and maximum absolute error of each field against the analytical
/// solution on the problem's dense metric grid.
pub fn solution_errors(problem: &Problem, nets: &[Network]) -> Result<(Vec<f64>, Vec<f64>)> {
    let pts = problem.metric_points();
    let fields = nets.len();
    let mut mae = vec![0.0; fields];
    let mut max_err = vec![0.0f64; fields];
    for x in &pts {
        let exact = oracle::exact_fields(problem.id, x);
        for (n, net) in nets.iter().enumerate() {
            let err = (net.forward(x)? - exact[n]).abs();
            mae[n] += err;
            max_err[n] = max_err[n].max(err);
        }
    }
    for m in &mut mae {
        *m /= pts.len() as f64;
    }
    Ok((mae, max_err))
}

fn take_snapshot(problem: &Problem, nets: &[Network], iteration: u64) -> Result<KernelSnapshot> {
    let sys = assemble(problem, nets)?;
    let kernel = ntk::kernel(&sys.j_g, &sys.j_b)?;
    let residual = sys.r_g.iter().chain(&sys.r_b).copied().collect();
    Ok(KernelSnapshot { iteration, kernel, residual })
}

/// Train `nets` in place on `problem` and record losses, weights,
/// checkpoints, and kernel snapshots.
///
/// Snapshots and checkpoints capture the state entering the listed iteration
/// (before that iteration's update); the value `iterations` refers to the
/// final state. A checkpoint is always taken at iteration 0 and at the end.
/// Loss weights refreshed by the adaptive scheme take effect from the next
/// iteration's update.
pub fn train(problem: &Problem, nets: &mut [Network], config: &TrainConfig) -> Result<TrainLog> {
    config.check()?;
    let (offsets, p_total) = param_offsets(nets);
    let mut theta: Vec<f64> = nets.iter().flat_map(Network::params).collect();
    let mut scratch = EvalScratch::new(nets);
    let mut adam = AdamState::new(p_total);
    let (mut w_g, mut w_b) = (config.w_g, config.w_b);

    let mut checkpoint_iters: Vec<u64> = config
        .snapshot_iters
        .iter()
        .copied()
        .chain([0, config.iterations])
        .filter(|&i| i <= config.iterations)
        .collect();
    checkpoint_iters.sort_unstable();
    checkpoint_iters.dedup();

    let n = config.iterations as usize;
    let mut log = TrainLog {
        loss_g: Vec::with_capacity(n + 1),
        loss_b: Vec::with_capacity(n + 1),
        w_g: Vec::with_capacity(n + 1),
        w_b: Vec::with_capacity(n + 1),
        checkpoints: Vec::new(),
        snapshots: Vec::new(),
        wall_ms_per_1000: Vec::new(),
    };

    let record_state = |iteration: u64,
                        nets: &[Network],
                        log: &mut TrainLog|
     -> Result<()> {
        if config.snapshot_iters.contains(&iteration) {
            log.snapshots.push(take_snapshot(problem, nets, iteration)?);
        }
        if checkpoint_iters.contains(&iteration) {
            let (mae, max_err) = solution_errors(problem, nets)?;
            log.checkpoints.push(Checkpoint { iteration, mae, max_err });
        }
        Ok(())
    };

    let mut window = Instant::now();
    for i in 0..config.iterations {
        record_state(i, nets, &mut log)?;

        let lg = loss_and_grad(problem, nets, w_g, w_b, &mut scratch)?;
        if !(lg.loss_g.is_finite() && lg.loss_b.is_finite()) {
            return Err(Error::Diverged { iteration: i as usize });
        }
        log.loss_g.push(lg.loss_g);
        log.loss_b.push(lg.loss_b);
        log.w_g.push(w_g);
        log.w_b.push(w_b);

        match config.optimizer {
            Optimizer::Adam => adam.step(&mut theta, &lg.grad, config.learning_rate),
            Optimizer::Gd => gd_step(&mut theta, &lg.grad, config.learning_rate),
        }
        write_params(nets, &offsets, &theta)?;

        if config.adaptive_weights && i % config.adaptive_period == 0 {
            (w_g, w_b) = trace_balanced_weights(lg.trace_gg, lg.trace_bb)?;
        }

        if (i + 1) % 1000 == 0 {
            log.wall_ms_per_1000.push(window.elapsed().as_secs_f64() * 1e3);
            window = Instant::now();
        }
    }
    if config.iterations % 1000 != 0 || config.iterations == 0 {
        log.wall_ms_per_1000.push(window.elapsed().as_secs_f64() * 1e3);
    }

    record_state(config.iterations, nets, &mut log)?;
    let lg = loss_and_grad(problem, nets, w_g, w_b, &mut scratch)?;
    if !(lg.loss_g.is_finite() && lg.loss_b.is_finite()) {
        return Err(Error::Diverged { iteration: config.iterations as usize });
    }
    log.loss_g.push(lg.loss_g);
    log.loss_b.push(lg.loss_b);
    log.w_g.push(w_g);
    log.w_b.push(w_b);
    Ok(log)
}
