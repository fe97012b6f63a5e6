use csalsa::frames::{Frame, FrameFamily};
use csalsa::harness::{epsilon_rule, run_experiment, ExperimentConfig, ExperimentKind, Formulation, ProblemInstance};
use csalsa::operators::{Identity, LinearMap, LinearOperatorSpec};
use csalsa::prox::{BallConstraint, L1Norm, Regularizer, Zero};
use csalsa::solver::{admm2_step, csalsa1, Block, SolverConfig, SolverState, SplitSpec, StopDecision};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0))
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

#[test]
fn single_identity_block_is_a_least_squares_fixed_point() {
    let n = 6;
    let identity = Identity(n);
    let mut split = SplitSpec::new(vec![Block::new(&identity, Zero)], |r| Ok(r.to_owned())).unwrap();
    let config = SolverConfig::default();

    let mut state = SolverState::zeros(&split);
    admm2_step(&mut state, &mut split, &config).unwrap();
    assert!(state.u.iter().all(|&x| x == 0.0));

    let r = Array1::from_iter((0..n).map(|i| i as f64 - 2.5));
    let mut state = SolverState::zeros(&split);
    state.v[0] = r.clone();
    admm2_step(&mut state, &mut split, &config).unwrap();
    assert_eq!(state.u, r);
}

#[test]
fn ball_block_is_feasible_after_every_step() {
    let n = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mask = Array2::from_shape_fn((n, n), |_| rng.random_bool(0.5));
    let op = LinearOperatorSpec::pixel_mask(mask).unwrap();
    let y = op.forward(random_vec(&mut rng, n * n).view()).unwrap();
    let epsilon = 0.3;
    let identity = Identity(n * n);
    let blocks = vec![
        Block::new(&identity, L1Norm),
        Block::new(&op as &dyn LinearMap, BallConstraint::new(y.clone(), epsilon).unwrap()),
    ];
    let mut split = SplitSpec::new(blocks, |r| {
        use csalsa::operators::ObservationOperator;
        op.shifted_normal_inverse(r)
    })
    .unwrap();
    let config = SolverConfig { epsilon, ..SolverConfig::default() };
    let mut state = SolverState::zeros(&split);
    for _ in 0..50 {
        admm2_step(&mut state, &mut split, &config).unwrap();
        assert!(norm(&(&state.v[1] - &y)) <= epsilon * (1.0 + 1e-12));
    }
}

#[test]
fn noiseless_identity_problem_returns_the_data() {
    let op = LinearOperatorSpec::pixel_mask(Array2::from_elem((8, 8), true)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = random_vec(&mut rng, 64);
    let y = op.observation(x.clone()).unwrap();
    let config = SolverConfig {
        epsilon: 0.0,
        max_iterations: 500,
        feasibility_slack: 0.0,
        objective_rel_tol: 1e-14,
        ..SolverConfig::default()
    };
    let out = csalsa1(&op, &y, &Regularizer::L1, &config, None).unwrap();
    let err = out.solution.iter().zip(x.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-9, "max deviation {err:e}");
}

#[test]
fn scalar_problem_converges_to_its_closed_form() {
    let op = LinearOperatorSpec::pixel_mask(Array2::from_elem((1, 1), true)).unwrap();
    let y = op.observation(Array1::from_elem(1, 5.0)).unwrap();
    let config = SolverConfig {
        mu: 1.0,
        epsilon: 1.0,
        max_iterations: 200,
        feasibility_slack: 0.0,
        objective_rel_tol: 1e-12,
        ..SolverConfig::default()
    };
    let out = csalsa1(&op, &y, &Regularizer::L1, &config, None).unwrap();
    assert!((out.solution[0] - 4.0).abs() <= 1e-6);
    assert!(out.iterations() <= 200);
}

/// For min ‖β‖₁ s.t. ‖Aβ − y‖ ≤ ε with an active constraint, optimality
/// asks for λ > 0 with −λ Aᵀ(Aβ − y) ∈ ∂‖β‖₁.
#[test]
fn synthesis_solution_satisfies_kkt_conditions() {
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mask = Array2::from_shape_fn((n, n), |_| rng.random_bool(0.6));
    let frame = Frame::new(FrameFamily::UndecimatedHaar, 1, (n, n)).unwrap();
    let op = LinearOperatorSpec::pixel_mask(mask).unwrap().with_frame(frame).unwrap();
    let truth = Array2::from_shape_fn((n, n), |(i, j)| if (2..6).contains(&i) && (3..7).contains(&j) { 4.0 } else { 1.0 });
    let clean = op.without_frame().forward(Array1::from_iter(truth.iter().cloned()).view()).unwrap();
    let noise = random_vec(&mut rng, clean.len()) * 0.1;
    let y = op.observation(&clean + &noise).unwrap();
    let epsilon = epsilon_rule(clean.len(), 0.1 / 3f64.sqrt()).unwrap();
    let config = SolverConfig {
        epsilon,
        mu: 1.0,
        max_iterations: 20_000,
        feasibility_slack: 0.0,
        objective_rel_tol: 1e-15,
        record_history: false,
        ..SolverConfig::default()
    };
    let beta = csalsa1(&op, &y, &Regularizer::L1, &config, None).unwrap().solution;

    let r = &op.forward(beta.view()).unwrap() - y.values();
    assert!((norm(&r) - epsilon).abs() <= 1e-6 * epsilon, "constraint not active");
    let a = op.adjoint(r.view()).unwrap();
    let support: Vec<usize> = (0..beta.len()).filter(|&i| beta[i].abs() > 1e-7).collect();
    assert!(!support.is_empty());
    let lambda = -support.iter().map(|&i| beta[i].signum() * a[i]).sum::<f64>()
        / support.iter().map(|&i| a[i] * a[i]).sum::<f64>();
    assert!(lambda > 0.0);
    for i in 0..beta.len() {
        let g = -lambda * a[i];
        if support.contains(&i) {
            assert!((g - beta[i].signum()).abs() <= 1e-4, "coefficient {i}: {g} vs sign {}", beta[i].signum());
        } else {
            assert!(g.abs() <= 1.0 + 1e-4, "coefficient {i}: |{g}| > 1");
        }
    }
}

#[test]
fn orthogonal_analysis_and_synthesis_agree() {
    let mut mses = Vec::new();
    for formulation in [Formulation::Analysis, Formulation::Synthesis] {
        let mut c = ExperimentConfig::new(ExperimentKind::Deblur1);
        c.size = Some(64);
        c.formulation = Some(formulation);
        c.frame = Some(FrameFamily::OrthogonalHaar);
        c.mu = Some(1.0);
        c.iterations = Some(5000);
        c.objective_rel_tol = Some(1e-9);
        let inst = ProblemInstance::from_config(&c).unwrap();
        let choice = c.solver_choice(inst.truth.dim()).unwrap();
        let report = run_experiment(&inst, &choice, &c.solver_config()).unwrap();
        mses.push(report.final_mse);
    }
    let gap = (mses[0] - mses[1]).abs() / mses[0];
    assert!(gap <= 0.05, "analysis mse {} vs synthesis mse {}", mses[0], mses[1]);
}

#[test]
fn small_mri_instance_is_feasible_and_accurate() {
    let mut c = ExperimentConfig::new(ExperimentKind::Mri);
    c.size = Some(64);
    c.lines = Some(22);
    c.iterations = Some(300);
    c.feasibility_slack = Some(0.0);
    let inst = ProblemInstance::from_config(&c).unwrap();
    let choice = c.solver_choice(inst.truth.dim()).unwrap();
    let r = run_experiment(&inst, &choice, &c.solver_config()).unwrap();
    assert_eq!(r.decision, StopDecision::Converged, "{}", r.summary_line());
    assert!(r.final_constraint_norm <= r.epsilon);
    assert!(r.final_mse < 1e-4, "{}", r.summary_line());
    assert!(r.iterations <= 300);
}

#[test]
fn deblurring_3a_analysis_converges_quickly() {
    let mut c = ExperimentConfig::new(ExperimentKind::Deblur3A);
    c.formulation = Some(Formulation::Analysis);
    let inst = ProblemInstance::from_config(&c).unwrap();
    assert_eq!(inst.truth.dim(), (128, 128));
    let choice = c.solver_choice(inst.truth.dim()).unwrap();
    let r = run_experiment(&inst, &choice, &c.solver_config()).unwrap();
    assert_eq!(r.decision, StopDecision::Converged);
    assert!(r.final_constraint_norm <= 1.01 * r.epsilon);
    assert!(r.iterations <= 150, "{}", r.summary_line());
}

#[test]
fn infeasible_budget_is_reported_as_exhausted() {
    let mut c = ExperimentConfig::new(ExperimentKind::Deblur1);
    c.size = Some(32);
    c.iterations = Some(3);
    c.epsilon = Some(1e-9);
    let inst = ProblemInstance::from_config(&c).unwrap();
    let choice = c.solver_choice(inst.truth.dim()).unwrap();
    let r = run_experiment(&inst, &choice, &c.solver_config()).unwrap();
    assert_eq!(r.decision, StopDecision::Exhausted);
    assert!(!r.feasible);
    assert_eq!(r.iterations, 3);
}
