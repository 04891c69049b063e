use pirbn_core::fd::{grad_fd, max_rel_err, rel_err};
use pirbn_core::model::{init_pirbn, CenterGrid, Network};
use pirbn_core::problems::{
    assemble, build_problem, loss_and_grad, EvalScratch, Problem, ProblemId, Resolution,
};
use pirbn_core::rbf::RbfKind;
use pirbn_core::train::{
    gd_step, solution_errors, trace_balanced_weights, train, AdamState, Checkpoint, Optimizer,
    TrainConfig, ADAM_BETA1, ADAM_BETA2, ADAM_EPS,
};
use pirbn_core::Error;

fn poisson_setup(seed: u64) -> (Problem, Vec<Network>) {
    let id = ProblemId::Poisson1D { mu: 2.0, shift: 0.0 };
    let problem = build_problem(id, Some(&Resolution { interior: vec![15] })).unwrap();
    let grid = CenterGrid::new(vec![(-0.1, 1.1)], vec![13]).unwrap();
    let nets = vec![Network::Pirbn(init_pirbn(RbfKind::Gaussian, &grid, 3.0, seed).unwrap())];
    (problem, nets)
}

fn base_config(iterations: u64) -> TrainConfig {
    TrainConfig {
        iterations,
        learning_rate: 1e-3,
        optimizer: Optimizer::Adam,
        w_g: 1.0,
        w_b: 1.0,
        adaptive_weights: false,
        adaptive_period: 1000,
        snapshot_iters: vec![],
    }
}

#[test]
fn small_gradient_descent_steps_decrease_the_loss_monotonically() {
    let (problem, mut nets) = poisson_setup(3);
    let config = TrainConfig {
        learning_rate: 1e-8,
        optimizer: Optimizer::Gd,
        ..base_config(200)
    };
    let log = train(&problem, &mut nets, &config).unwrap();

    let combined: Vec<f64> = log
        .loss_g
        .iter()
        .zip(&log.loss_b)
        .map(|(g, b)| g + b)
        .collect();
    assert_eq!(combined.len(), 201);
    for w in combined.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "loss rose from {} to {}", w[0], w[1]);
    }
    assert!(combined[200] < combined[0], "no progress over 200 steps");
}

#[test]
fn adam_first_step_is_a_signed_unit_step() {
    let mut theta = vec![1.0, -2.0, 0.5];
    let theta0 = theta.clone();
    let grad = vec![3.0, -0.25, 1e-12];
    let lr = 1e-3;
    let mut adam = AdamState::new(3);
    adam.step(&mut theta, &grad, lr);
    assert_eq!(adam.t, 1);

    for i in 0..3 {
        let m = (1.0 - ADAM_BETA1) * grad[i];
        let v = (1.0 - ADAM_BETA2) * grad[i] * grad[i];
        let m_hat = m / (1.0 - ADAM_BETA1);
        let v_hat = v / (1.0 - ADAM_BETA2);
        let expected = theta0[i] - lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        assert_eq!(theta[i], expected, "coordinate {i}");
    }
    // With the moments fresh, each coordinate moves by roughly the learning
    // rate in the gradient's direction, independent of its magnitude.
    assert!((theta[0] - (theta0[0] - lr)).abs() < 1e-6 * lr);
    assert!((theta[1] - (theta0[1] + lr)).abs() < 1e-6 * lr);
    assert!((theta[2] - theta0[2]).abs() <= lr);

    let mut t = vec![1.0, 1.0];
    gd_step(&mut t, &[0.5, -2.0], 0.1);
    assert_eq!(t, vec![0.95, 1.2]);
}

#[test]
fn integrated_first_adam_step_matches_the_fused_gradient() {
    let (problem, nets) = poisson_setup(5);
    let mut trained = nets.clone();
    let config = base_config(1);
    train(&problem, &mut trained, &config).unwrap();

    let mut scratch = EvalScratch::new(&nets);
    let lg = loss_and_grad(&problem, &nets, 1.0, 1.0, &mut scratch).unwrap();
    let mut theta: Vec<f64> = nets.iter().flat_map(Network::params).collect();
    let mut adam = AdamState::new(theta.len());
    adam.step(&mut theta, &lg.grad, config.learning_rate);

    assert_eq!(trained[0].params(), theta);
}

#[test]
fn adaptive_weights_follow_the_kernel_block_traces() {
    let (problem, mut nets) = poisson_setup(7);
    let init = nets.clone();
    let config = TrainConfig {
        adaptive_weights: true,
        adaptive_period: 5,
        ..base_config(6)
    };
    let log = train(&problem, &mut nets, &config).unwrap();

    let mut scratch = EvalScratch::new(&init);
    let lg0 = loss_and_grad(&problem, &init, 1.0, 1.0, &mut scratch).unwrap();
    let (w_g1, w_b1) = trace_balanced_weights(lg0.trace_gg, lg0.trace_bb).unwrap();

    // Initial weights apply to the first update; the refresh computed at
    // iteration 0 takes effect from iteration 1 and holds until the next
    // refresh at iteration 5 lands on iteration 6.
    assert_eq!(log.w_g[0], 1.0);
    assert_eq!(log.w_b[0], 1.0);
    for i in 1..=5 {
        assert_eq!(log.w_g[i], w_g1, "iteration {i}");
        assert_eq!(log.w_b[i], w_b1, "iteration {i}");
    }
    assert_ne!(log.w_g[6], w_g1);

    let identity = rel_err(w_g1 * lg0.trace_gg, w_b1 * lg0.trace_bb);
    assert!(identity < 1e-12, "trace identity violated: {identity}");
    assert!(w_b1 > w_g1, "boundary rows are fewer, so their weight should exceed w_g");

    assert!(matches!(
        trace_balanced_weights(0.0, 1.0),
        Err(Error::DegenerateKernel(_))
    ));
}

#[test]
fn training_is_deterministic() {
    let (problem, nets) = poisson_setup(9);
    let config = TrainConfig {
        adaptive_weights: true,
        adaptive_period: 10,
        snapshot_iters: vec![0, 25, 50],
        ..base_config(50)
    };

    let mut a = nets.clone();
    let log_a = train(&problem, &mut a, &config).unwrap();
    let mut b = nets.clone();
    let log_b = train(&problem, &mut b, &config).unwrap();

    assert_eq!(a[0].params(), b[0].params());
    assert_eq!(log_a.loss_g, log_b.loss_g);
    assert_eq!(log_a.loss_b, log_b.loss_b);
    assert_eq!(log_a.w_g, log_b.w_g);
    assert_eq!(log_a.w_b, log_b.w_b);
    assert_eq!(log_a.checkpoints, log_b.checkpoints);
    assert_eq!(log_a.snapshots, log_b.snapshots);
    // Wall-clock windows are the one intentionally non-reproducible field.
    assert_eq!(log_a.wall_ms_per_1000.len(), log_b.wall_ms_per_1000.len());
}

#[test]
fn snapshots_and_checkpoints_land_on_requested_iterations() {
    let (problem, mut nets) = poisson_setup(11);
    let init = nets.clone();
    let config = TrainConfig {
        snapshot_iters: vec![0, 4, 10, 99],
        ..base_config(10)
    };
    let log = train(&problem, &mut nets, &config).unwrap();

    let snap_iters: Vec<u64> = log.snapshots.iter().map(|s| s.iteration).collect();
    assert_eq!(snap_iters, vec![0, 4, 10], "entries beyond the run are skipped");
    let cp_iters: Vec<u64> = log.checkpoints.iter().map(|c| c.iteration).collect();
    assert_eq!(cp_iters, vec![0, 4, 10]);

    let n = problem.n_g() + problem.n_b();
    for snap in &log.snapshots {
        assert_eq!((snap.kernel.rows, snap.kernel.cols), (n, n));
        assert_eq!(snap.residual.len(), n);
    }

    // The first snapshot captures the untrained state exactly.
    let sys = assemble(&problem, &init).unwrap();
    let stacked: Vec<f64> = sys.r_g.iter().chain(&sys.r_b).copied().collect();
    assert_eq!(log.snapshots[0].residual, stacked);

    for Checkpoint { mae, max_err, .. } in &log.checkpoints {
        assert_eq!(mae.len(), 1);
        assert!(mae[0] <= max_err[0]);
        assert!(mae[0].is_finite());
    }

    assert_eq!(log.loss_g.len(), 11);
    assert_eq!(log.wall_ms_per_1000.len(), 1);
}

#[test]
fn divergent_states_abort_with_the_iteration() {
    let (problem, mut nets) = poisson_setup(13);
    let mut p = nets[0].params();
    p[0] = 1e200;
    nets[0].set_params(&p).unwrap();
    let err = train(&problem, &mut nets, &base_config(3)).unwrap_err();
    assert!(matches!(err, Error::Diverged { iteration: 0 }));
}

#[test]
fn config_validation_rejects_bad_settings() {
    let (problem, mut nets) = poisson_setup(15);
    for config in [
        TrainConfig { learning_rate: -1.0, ..base_config(1) },
        TrainConfig { learning_rate: f64::NAN, ..base_config(1) },
        TrainConfig { w_b: 0.0, ..base_config(1) },
        TrainConfig { adaptive_period: 0, ..base_config(1) },
    ] {
        assert!(matches!(
            train(&problem, &mut nets, &config),
            Err(Error::InvalidInput(_))
        ));
    }

    let parsed: TrainConfig = serde_json::from_str(r#"{"iterations": 100}"#).unwrap();
    assert_eq!(parsed.optimizer, Optimizer::Adam);
    assert_eq!(parsed.learning_rate, 1e-3);
    assert_eq!(parsed.snapshot_iters, vec![0, 2000, 20000]);
    assert!(!parsed.adaptive_weights);
    let gd: TrainConfig =
        serde_json::from_str(r#"{"iterations": 1, "optimizer": "gd"}"#).unwrap();
    assert_eq!(gd.optimizer, Optimizer::Gd);
}

#[test]
fn fused_gradient_still_matches_finite_differences_after_training() {
    let (problem, mut nets) = poisson_setup(17);
    train(&problem, &mut nets, &base_config(30)).unwrap();

    let mut scratch = EvalScratch::new(&nets);
    let (w_g, w_b) = (1.0, 4.0);
    let lg = loss_and_grad(&problem, &nets, w_g, w_b, &mut scratch).unwrap();
    let theta = nets[0].params();
    let fd = grad_fd(
        |p| {
            let mut moved = nets.clone();
            moved[0].set_params(p).unwrap();
            let mut s = EvalScratch::new(&moved);
            let l = loss_and_grad(&problem, &moved, w_g, w_b, &mut s).unwrap();
            w_g * l.loss_g + w_b * l.loss_b
        },
        &theta,
    );
    let err = max_rel_err(&lg.grad, &fd);
    assert!(err < 1e-5, "gradient at trained state: rel err {err}");
}

#[test]
fn solution_errors_average_the_oracle_gap() {
    let (problem, nets) = poisson_setup(19);
    let zeroed = {
        let mut z = nets.clone();
        let mut p = z[0].params();
        let d = p.len() / 2;
        p[..d].fill(0.0);
        z[0].set_params(&p).unwrap();
        z
    };
    let (mae, max_err) = solution_errors(&problem, &zeroed).unwrap();

    let pts = problem.metric_points();
    let mut want_mae = 0.0;
    let mut want_max = 0.0f64;
    for x in &pts {
        let e = pirbn_core::oracle::exact_u(problem.id, x).abs();
        want_mae += e;
        want_max = want_max.max(e);
    }
    want_mae /= pts.len() as f64;
    assert_eq!(mae, vec![want_mae]);
    assert_eq!(max_err, vec![want_max]);
}

#[test]
fn two_field_and_two_dimensional_problems_train() {
    let ucm = build_problem(
        ProblemId::UcmPoiseuille,
        Some(&Resolution { interior: vec![3, 4] }),
    )
    .unwrap();
    let grid = CenterGrid::new(vec![(-0.7, 0.7), (-0.2, 4.2)], vec![3, 4]).unwrap();
    let mut nets = vec![
        Network::Pirbn(init_pirbn(RbfKind::Gaussian, &grid, 1.0, 21).unwrap()),
        Network::Pirbn(init_pirbn(RbfKind::Gaussian, &grid, 1.0, 22).unwrap()),
    ];
    let log = train(&ucm, &mut nets, &base_config(5)).unwrap();
    assert_eq!(log.loss_g.len(), 6);
    assert!(log.loss_g.iter().all(|l| l.is_finite()));
    let last = log.checkpoints.last().unwrap();
    assert_eq!(last.mae.len(), 2);

    let wave = build_problem(ProblemId::Wave2D, Some(&Resolution { interior: vec![4, 4] }))
        .unwrap();
    let wave_grid = CenterGrid::new(vec![(-0.1, 1.1), (-0.1, 1.1)], vec![4, 4]).unwrap();
    let mut wave_nets =
        vec![Network::Pirbn(init_pirbn(RbfKind::Gaussian, &wave_grid, 2.0, 23).unwrap())];
    let log = train(&wave, &mut wave_nets, &base_config(3)).unwrap();
    assert_eq!(log.loss_g.len(), 4);
}
