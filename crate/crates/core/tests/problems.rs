use pirbn_core::fd::{central_diff, grad_fd, max_rel_err, rel_err, second_central_diff};
use pirbn_core::model::{init_fnn, init_pirbn, CenterGrid, Network};
use pirbn_core::oracle::UcmConstants;
use pirbn_core::problems::{
    assemble, build_problem, loss_and_grad, param_offsets, BcKind, EvalScratch, Problem,
    ProblemId, Resolution,
};
use pirbn_core::rbf::RbfKind;
use pirbn_core::Error;

const ALL_IDS: [ProblemId; 6] = [
    ProblemId::Poisson1D { mu: 8.0, shift: 100.0 },
    ProblemId::MixedFreq1D,
    ProblemId::Spring1D,
    ProblemId::Wave2D,
    ProblemId::Diffusion2D,
    ProblemId::UcmPoiseuille,
];

fn pirbn_net(ranges: &[(f64, f64)], counts: &[usize], b0: f64, seed: u64) -> Network {
    let grid = CenterGrid::new(ranges.to_vec(), counts.to_vec()).unwrap();
    Network::Pirbn(init_pirbn(RbfKind::Gaussian, &grid, b0, seed).unwrap())
}

/// Small networks whose centers cover each problem's domain, cheap enough for
/// finite-difference sweeps over every parameter.
fn small_nets(id: ProblemId) -> Vec<Network> {
    match id {
        ProblemId::Poisson1D { shift, .. } => {
            vec![pirbn_net(&[(shift - 0.1, shift + 1.1)], &[9], 2.0, 11)]
        }
        ProblemId::MixedFreq1D => vec![pirbn_net(&[(19.8, 22.2)], &[9], 2.0, 12)],
        ProblemId::Spring1D => vec![pirbn_net(&[(-1.0, 101.0)], &[9], 0.05, 13)],
        ProblemId::Wave2D => {
            vec![pirbn_net(&[(-0.1, 1.1), (-0.1, 1.1)], &[3, 3], 2.0, 14)]
        }
        ProblemId::Diffusion2D => {
            vec![pirbn_net(&[(4.5, 10.5), (4.5, 10.5)], &[3, 3], 0.5, 15)]
        }
        ProblemId::UcmPoiseuille => vec![
            pirbn_net(&[(-0.7, 0.7), (-0.2, 4.2)], &[3, 4], 1.0, 16),
            pirbn_net(&[(-0.7, 0.7), (-0.2, 4.2)], &[3, 4], 1.0, 17),
        ],
    }
}

/// Coarse resolution keeping full finite-difference sweeps affordable.
fn small_resolution(id: ProblemId) -> Resolution {
    let interior = match id.input_dim() {
        1 => vec![5],
        _ => vec![3, 3],
    };
    Resolution { interior }
}

/// Clone with the output zeroed: outer weights for a PIRBN (shapes must stay
/// nonzero), every parameter for an FNN.
fn zeroed(net: &Network) -> Network {
    let mut z = net.clone();
    let mut p = z.params();
    match &z {
        Network::Pirbn(n) => p[..n.a.len()].fill(0.0),
        Network::Fnn(_) => p.fill(0.0),
    }
    z.set_params(&p).unwrap();
    z
}

fn stacked(nets: &[Network]) -> Vec<f64> {
    nets.iter().flat_map(Network::params).collect()
}

fn set_stacked(nets: &[Network], p: &[f64]) -> Vec<Network> {
    let (offsets, total) = param_offsets(nets);
    assert_eq!(p.len(), total);
    nets.iter()
        .zip(&offsets)
        .map(|(n, &o)| {
            let mut m = n.clone();
            m.set_params(&p[o..o + n.param_count()]).unwrap();
            m
        })
        .collect()
}

#[test]
fn default_layouts_have_expected_counts() {
    let cases = [
        (ALL_IDS[0], 51, 2),
        (ALL_IDS[1], 101, 2),
        (ALL_IDS[2], 1001, 2),
        (ALL_IDS[3], 2601, 204),
        (ALL_IDS[4], 2601, 153),
        (ALL_IDS[5], 5252, 254),
    ];
    for (id, n_g, n_b) in cases {
        let p = build_problem(id, None).unwrap();
        assert_eq!(p.n_g(), n_g, "{id} governing rows");
        assert_eq!(p.n_b(), n_b, "{id} boundary rows");
        assert_eq!(p.forcing.len(), p.interior.len());
        let domain = id.domain();
        for x in &p.interior {
            assert_eq!(x.len(), id.input_dim());
            for (v, &(lo, hi)) in x.iter().zip(&domain) {
                assert!(lo < *v && *v < hi, "{id} interior point {v} not inside ({lo}, {hi})");
            }
        }
        for g in &p.forcing {
            assert_eq!(g.len(), p.families());
        }
    }
}

#[test]
fn wave_constrains_three_edges_only() {
    let p = build_problem(ProblemId::Wave2D, None).unwrap();
    // The outflow edge x = 1 is unconstrained; only the lateral edges reach
    // it at their corners.
    for bc in &p.boundary {
        assert!(bc.point[0] < 1.0 || bc.point[1] == 0.0 || bc.point[1] == 1.0);
    }
    let derivs: Vec<_> = p
        .boundary
        .iter()
        .filter(|bc| matches!(bc.bc, BcKind::FirstDerivative { .. }))
        .collect();
    assert_eq!(derivs.len(), 51);
    for bc in &derivs {
        assert_eq!(bc.bc, BcKind::FirstDerivative { axis: 0 });
        assert_eq!(bc.point[0], 0.0);
        assert_eq!(bc.target, 0.0);
    }
    // The inflow edge also pins the wave profile itself.
    let inflow_values = p
        .boundary
        .iter()
        .filter(|bc| bc.bc == BcKind::Value && bc.point[0] == 0.0 && bc.target != 0.0)
        .count();
    assert!(inflow_values >= 49);
}

#[test]
fn diffusion_leaves_the_final_time_open() {
    let p = build_problem(ProblemId::Diffusion2D, None).unwrap();
    for bc in &p.boundary {
        let (x, t) = (bc.point[0], bc.point[1]);
        assert!(x == 5.0 || x == 10.0 || t == 5.0);
        // Nothing pins down the final time except the spatial-edge corners.
        assert!(t < 10.0 || x == 5.0 || x == 10.0);
        assert_eq!(bc.bc, BcKind::Value);
    }
}

#[test]
fn ucm_boundary_splits_by_field() {
    let p = build_problem(ProblemId::UcmPoiseuille, None).unwrap();
    // 202 wall rows plus the two initial-condition rows that land on the
    // wall corners; every one of them pins the velocity to zero.
    let walls: Vec<_> = p
        .boundary
        .iter()
        .filter(|bc| bc.net == 0 && bc.point[0].abs() == 0.5)
        .collect();
    assert_eq!(walls.len(), 204);
    // The corner rows take series values, which carry float noise at the
    // upper wall where sin((2i - 1) pi) is not exactly zero.
    assert!(walls.iter().all(|bc| bc.target.abs() < 1e-12));
    let stress_ic: Vec<_> = p.boundary.iter().filter(|bc| bc.net == 1).collect();
    assert_eq!(stress_ic.len(), 26);
    assert!(stress_ic.iter().all(|bc| bc.point[1] == 0.0));
    // Truncated-series stress at t = 0 is small but not identically zero;
    // the targets keep the boundary data consistent with the series truth.
    let max_ic = stress_ic.iter().map(|bc| bc.target.abs()).fold(0.0, f64::max);
    assert!(max_ic > 1e-6 && max_ic < 1e-2, "stress IC magnitude {max_ic}");
    // 26 velocity initial-condition rows plus the two wall rows at t = 0.
    let velocity_t0 = p
        .boundary
        .iter()
        .filter(|bc| bc.net == 0 && bc.point[1] == 0.0)
        .count();
    assert_eq!(velocity_t0, 28);
}

#[test]
fn resolution_override_and_validation() {
    let id = ProblemId::Poisson1D { mu: 4.0, shift: 0.0 };
    let p = build_problem(id, Some(&Resolution { interior: vec![101] })).unwrap();
    assert_eq!(p.n_g(), 101);
    assert_eq!(p.n_b(), 2);

    let wrong_len = build_problem(id, Some(&Resolution { interior: vec![5, 5] }));
    assert!(matches!(wrong_len, Err(Error::InvalidInput(_))));
    let zero = build_problem(id, Some(&Resolution { interior: vec![0] }));
    assert!(matches!(zero, Err(Error::InvalidInput(_))));
}

#[test]
fn zero_networks_reproduce_forcing_and_targets() {
    for id in ALL_IDS {
        let problem = build_problem(id, Some(&small_resolution(id))).unwrap();
        let nets: Vec<Network> = small_nets(id).iter().map(zeroed).collect();
        let sys = assemble(&problem, &nets).unwrap();
        let n_pts = problem.interior.len();
        for (k, g) in problem.forcing.iter().enumerate() {
            for (f, &gf) in g.iter().enumerate() {
                assert_eq!(sys.r_g[f * n_pts + k], -gf, "{id} family {f} point {k}");
            }
        }
        for (k, bc) in problem.boundary.iter().enumerate() {
            assert_eq!(sys.r_b[k], -bc.target, "{id} boundary row {k}");
        }
    }
}

/// Finite-difference operator values of the networks themselves, restating
/// each governing equation with difference quotients instead of analytic
/// derivatives.
fn fd_operator(id: ProblemId, nets: &[Network], x: &[f64]) -> Vec<f64> {
    let axis = |net: usize, k: usize| {
        let x = x.to_vec();
        move |v: f64| {
            let mut p = x.clone();
            p[k] = v;
            nets[net].forward(&p).unwrap()
        }
    };
    let u = |net: usize| nets[net].forward(x).unwrap();
    match id {
        ProblemId::Poisson1D { .. } => vec![-second_central_diff(axis(0, 0), x[0])],
        ProblemId::MixedFreq1D => vec![second_central_diff(axis(0, 0), x[0])],
        ProblemId::Spring1D => {
            vec![second_central_diff(axis(0, 0), x[0]) + 4.0 * u(0) + u(0).sin()]
        }
        ProblemId::Wave2D => vec![
            second_central_diff(axis(0, 0), x[0]) - 4.0 * second_central_diff(axis(0, 1), x[1]),
        ],
        ProblemId::Diffusion2D => vec![
            central_diff(axis(0, 1), x[1]) - 0.01 * second_central_diff(axis(0, 0), x[0]),
        ],
        ProblemId::UcmPoiseuille => {
            let c = UcmConstants::benchmark();
            vec![
                c.rho * central_diff(axis(0, 1), x[1]) - central_diff(axis(1, 0), x[0]),
                c.lambda * central_diff(axis(1, 1), x[1]) + u(1)
                    - c.eta0 * central_diff(axis(0, 0), x[0]),
            ]
        }
    }
}

#[test]
fn residuals_vanish_on_manufactured_problems() {
    for id in ALL_IDS {
        let mut problem = build_problem(id, Some(&small_resolution(id))).unwrap();
        let nets = small_nets(id);
        for (k, x) in problem.interior.clone().iter().enumerate() {
            problem.forcing[k] = fd_operator(id, &nets, x);
        }
        for bc in &mut problem.boundary {
            bc.target = match bc.bc {
                BcKind::Value => nets[bc.net].forward(&bc.point).unwrap(),
                BcKind::FirstDerivative { axis } => {
                    let point = bc.point.clone();
                    let net = bc.net;
                    central_diff(
                        |v: f64| {
                            let mut p = point.clone();
                            p[axis] = v;
                            nets[net].forward(&p).unwrap()
                        },
                        bc.point[axis],
                    )
                }
            };
        }
        let sys = assemble(&problem, &nets).unwrap();
        let worst_g = sys.r_g.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let worst_b = sys.r_b.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst_g < 1e-5, "{id} governing residual {worst_g}");
        assert!(worst_b < 1e-6, "{id} boundary residual {worst_b}");
    }
}

#[test]
fn jacobian_rows_match_finite_differences() {
    let mut setups: Vec<(ProblemId, Vec<Network>)> =
        ALL_IDS.iter().map(|&id| (id, small_nets(id))).collect();
    let fnn = Network::Fnn(init_fnn(&[1, 8, 1], 21).unwrap());
    setups.push((ProblemId::Poisson1D { mu: 8.0, shift: 100.0 }, vec![fnn]));

    for (id, nets) in setups {
        let problem = build_problem(id, Some(&small_resolution(id))).unwrap();
        let theta = stacked(&nets);
        let sys = assemble(&problem, &nets).unwrap();

        for ridx in 0..problem.n_g() {
            let fd = grad_fd(
                |p| assemble(&problem, &set_stacked(&nets, p)).unwrap().r_g[ridx],
                &theta,
            );
            let err = max_rel_err(sys.j_g.row(ridx), &fd);
            assert!(err < 5e-5, "{id} governing row {ridx}: rel err {err}");
        }
        for ridx in 0..problem.n_b() {
            let fd = grad_fd(
                |p| assemble(&problem, &set_stacked(&nets, p)).unwrap().r_b[ridx],
                &theta,
            );
            let err = max_rel_err(sys.j_b.row(ridx), &fd);
            assert!(err < 5e-5, "{id} boundary row {ridx}: rel err {err}");
        }
    }
}

#[test]
fn fused_path_matches_dense_products() {
    let poisson = ProblemId::Poisson1D { mu: 2.0, shift: 0.0 };
    let poisson_nets = vec![pirbn_net(&[(-0.1, 1.1)], &[13], 3.0, 31)];
    let setups = [
        (poisson, None, poisson_nets),
        (ProblemId::UcmPoiseuille, Some(small_resolution(ProblemId::UcmPoiseuille)), small_nets(ProblemId::UcmPoiseuille)),
    ];
    let (w_g, w_b) = (1.0, 10.0);

    for (id, res, nets) in setups {
        let problem = build_problem(id, res.as_ref()).unwrap();
        let sys = assemble(&problem, &nets).unwrap();
        let mut scratch = EvalScratch::new(&nets);
        let lg = loss_and_grad(&problem, &nets, w_g, w_b, &mut scratch).unwrap();

        let loss_g: f64 = sys.r_g.iter().map(|r| 0.5 * r * r).sum();
        let loss_b: f64 = sys.r_b.iter().map(|r| 0.5 * r * r).sum();
        assert!(rel_err(lg.loss_g, loss_g) < 1e-14, "{id} loss_g");
        assert!(rel_err(lg.loss_b, loss_b) < 1e-14, "{id} loss_b");

        let gg = sys.j_g.t_mul_vec(&sys.r_g);
        let gb = sys.j_b.t_mul_vec(&sys.r_b);
        let dense: Vec<f64> = gg
            .iter()
            .zip(&gb)
            .map(|(a, b)| w_g * a + w_b * b)
            .collect();
        let err = max_rel_err(&lg.grad, &dense);
        assert!(err < 1e-12, "{id} fused gradient: rel err {err}");

        let frob = |m: &pirbn_core::linalg::Mat| m.frobenius().powi(2);
        assert!(rel_err(lg.trace_gg, frob(&sys.j_g)) < 1e-12, "{id} trace_gg");
        assert!(rel_err(lg.trace_bb, frob(&sys.j_b)) < 1e-12, "{id} trace_bb");
    }
}

#[test]
fn fused_gradient_matches_loss_finite_differences() {
    let id = ProblemId::Poisson1D { mu: 2.0, shift: 0.0 };
    let problem = build_problem(id, Some(&Resolution { interior: vec![7] })).unwrap();
    let nets = vec![pirbn_net(&[(-0.1, 1.1)], &[9], 2.0, 41)];
    let (w_g, w_b) = (1.0, 25.0);

    let mut scratch = EvalScratch::new(&nets);
    let lg = loss_and_grad(&problem, &nets, w_g, w_b, &mut scratch).unwrap();
    let theta = stacked(&nets);
    let fd = grad_fd(
        |p| {
            let moved = set_stacked(&nets, p);
            let mut s = EvalScratch::new(&moved);
            let l = loss_and_grad(&problem, &moved, w_g, w_b, &mut s).unwrap();
            w_g * l.loss_g + w_b * l.loss_b
        },
        &theta,
    );
    let err = max_rel_err(&lg.grad, &fd);
    assert!(err < 1e-5, "loss gradient vs finite differences: rel err {err}");
}

#[test]
fn gaussian_locality_sparsifies_spring_rows() {
    let problem = build_problem(ProblemId::Spring1D, None).unwrap();
    let nets = vec![pirbn_net(&[(-1.0, 101.0)], &[1021], 10.0, 51)];
    let sys = assemble(&problem, &nets).unwrap();

    for ridx in 0..problem.n_g() {
        let nonzero = sys.j_g.row(ridx).iter().filter(|v| **v != 0.0).count();
        assert!(
            (2..=40).contains(&nonzero),
            "row {ridx} has {nonzero} nonzero entries"
        );
    }

    // The fused path must honor the same active sets.
    let mut scratch = EvalScratch::new(&nets);
    let lg = loss_and_grad(&problem, &nets, 1.0, 1.0, &mut scratch).unwrap();
    let gg = sys.j_g.t_mul_vec(&sys.r_g);
    let gb = sys.j_b.t_mul_vec(&sys.r_b);
    let dense: Vec<f64> = gg.iter().zip(&gb).map(|(a, b)| a + b).collect();
    let err = max_rel_err(&lg.grad, &dense);
    assert!(err < 1e-12, "fused gradient under pruning: rel err {err}");
}

#[test]
fn assembly_is_deterministic() {
    let id = ProblemId::UcmPoiseuille;
    let a = build_problem(id, None).unwrap();
    let b = build_problem(id, None).unwrap();
    assert_eq!(a, b);

    let res = small_resolution(id);
    let problem = build_problem(id, Some(&res)).unwrap();
    let nets = small_nets(id);
    assert_eq!(
        assemble(&problem, &nets).unwrap(),
        assemble(&problem, &nets).unwrap()
    );
}

#[test]
fn problem_id_serde_and_display() {
    let id: ProblemId = serde_json::from_str(r#"{"name":"poisson1d"}"#).unwrap();
    assert_eq!(id, ProblemId::Poisson1D { mu: 1.0, shift: 0.0 });
    let shifted: ProblemId =
        serde_json::from_str(r#"{"name":"poisson1d","mu":8.0,"shift":100.0}"#).unwrap();
    assert_eq!(shifted.domain(), vec![(100.0, 101.0)]);
    assert_eq!(shifted.to_string(), "poisson1d(mu=8, shift=100)");

    let ucm: ProblemId = serde_json::from_str(r#"{"name":"ucm_poiseuille"}"#).unwrap();
    assert_eq!(ucm, ProblemId::UcmPoiseuille);
    assert_eq!(ucm.field_count(), 2);
    let back = serde_json::to_string(&ucm).unwrap();
    assert!(back.contains("ucm_poiseuille"));

    let res: Resolution = serde_json::from_str(r#"{"interior":[7]}"#).unwrap();
    assert_eq!(res.interior, vec![7]);
}

#[test]
fn metric_grid_is_denser_than_training_grid() {
    let p = build_problem(ProblemId::Poisson1D { mu: 4.0, shift: 0.0 }, None).unwrap();
    let pts = p.metric_points();
    assert_eq!(pts.len(), 511);
    assert_eq!(pts[0], vec![0.0]);
    assert_eq!(pts[510], vec![1.0]);

    let w = build_problem(ProblemId::Wave2D, None).unwrap();
    let pts = w.metric_points();
    assert_eq!(pts.len(), 103 * 103);
    assert_eq!(pts[0], vec![0.0, 0.0]);
    assert_eq!(pts[pts.len() - 1], vec![1.0, 1.0]);
}

#[test]
fn rejects_mismatched_networks() {
    let problem = build_problem(ProblemId::UcmPoiseuille, Some(&small_resolution(ProblemId::UcmPoiseuille))).unwrap();
    let one_net = vec![small_nets(ProblemId::UcmPoiseuille).remove(0)];
    assert!(matches!(
        assemble(&problem, &one_net),
        Err(Error::DimensionMismatch(_))
    ));

    let wave = build_problem(ProblemId::Wave2D, Some(&small_resolution(ProblemId::Wave2D))).unwrap();
    let nets_1d = small_nets(ProblemId::Spring1D);
    assert!(matches!(
        assemble(&wave, &nets_1d),
        Err(Error::DimensionMismatch(_))
    ));
}
