//! The fast property suite behind `csalsa validate`: adjoint, inverse and
//! selection identities, dense-matrix oracles on 8×8 grids, frame
//! identities, proximal-map oracles, solver invariants and harness
//! reproducibility. Each property reports pass/fail with its worst error.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::frames::{Frame, FrameFamily};
use crate::harness::{
    epsilon_rule, make_blur_kernel, radial_mask, random_pixel_mask, run_experiment, BlurKernel,
    ExperimentConfig, ExperimentKind, ProblemInstance,
};
use crate::operators::fft::Fft2;
use crate::operators::{
    CircularConvolution, FrameAnalysis, Identity, LinearMap, LinearOperatorSpec, ObservationOperator,
    OperatorKind, PartialFourier,
};
use crate::prox::{
    soft_threshold, tv_prox, BallConstraint, L1Norm, ProximalFunction, TvSettings,
};
use crate::solver::{admm2_step, csalsa1, Block, SolverConfig, SolverState, SplitSpec};
use crate::vector::{distance, dot, norm};

/// Soft budget for the whole suite.
pub const TIME_BUDGET: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Multiplies the unitary DFT scale of every Fourier-based operator the
    /// suite builds. Anything but 1 is a deliberate fault.
    pub fft_scale_error: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { fft_scale_error: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub results: Vec<PropertyResult>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn within_budget(&self) -> bool {
        self.elapsed <= TIME_BUDGET
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

pub fn run_suite(options: &ValidateOptions) -> SuiteReport {
    let started = Instant::now();
    let mut suite = Suite {
        options: *options,
        results: Vec::new(),
    };
    suite.fft();
    suite.operators();
    suite.dense_oracles();
    suite.frames();
    suite.prox();
    suite.solver();
    suite.harness();
    SuiteReport {
        results: suite.results,
        elapsed: started.elapsed(),
    }
}

struct Suite {
    options: ValidateOptions,
    results: Vec<PropertyResult>,
}

/// A named operator family built for the suite.
struct Family {
    name: String,
    op: LinearOperatorSpec,
}

impl Suite {
    fn record(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        let (passed, detail) = match outcome {
            Ok(pair) => pair,
            Err(e) => (false, format!("error: {e}")),
        };
        self.results.push(PropertyResult {
            name: name.into(),
            passed,
            detail,
        });
    }

    /// Records `worst <= tol`.
    fn check(&mut self, name: impl Into<String>, outcome: Result<f64>, tol: f64) {
        let outcome = outcome.map(|worst| (worst <= tol, format!("worst {worst:.3e}, tolerance {tol:.0e}")));
        self.record(name, outcome);
    }

    fn fft2(&self, h: usize, w: usize) -> Fft2 {
        let scale = self.options.fft_scale_error / ((h * w) as f64).sqrt();
        Fft2::with_scale(h, w, scale)
    }

    /// Convolution, pixel mask and partial Fourier on an n×n grid, each
    /// alone and composed with both frames.
    fn families(&self, n: usize, levels: usize) -> Result<Vec<Family>> {
        let kernel = make_blur_kernel(BlurKernel::InverseQuadratic { support: 5 })?;
        let bases = vec![
            (
                "convolution",
                LinearOperatorSpec::new(OperatorKind::CircularConvolution(CircularConvolution::with_fft(
                    kernel.view(),
                    self.fft2(n, n),
                )?)),
            ),
            ("mask", LinearOperatorSpec::pixel_mask(random_pixel_mask((n, n), 0.4, 11)?)?),
            (
                "fourier",
                LinearOperatorSpec::new(OperatorKind::PartialFourier(PartialFourier::with_fft(
                    radial_mask(n, 3)?,
                    self.fft2(n, n),
                )?)),
            ),
        ];
        let mut out = Vec::new();
        for (name, op) in bases {
            for family in [FrameFamily::OrthogonalHaar, FrameFamily::UndecimatedHaar] {
                let frame = Frame::new(family, levels, (n, n))?;
                out.push(Family {
                    name: format!("{name}-synthesis-{}", family_name(family)),
                    op: op.clone().with_frame(frame)?,
                });
            }
            out.push(Family {
                name: format!("{name}-analysis"),
                op,
            });
        }
        Ok(out)
    }

    fn fft(&mut self) {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fft = self.fft2(16, 12);
        let mut worst_energy: f64 = 0.0;
        let mut worst_round: f64 = 0.0;
        for _ in 0..20 {
            let x = gaussian_image(&mut rng, (16, 12));
            let fx = fft.forward_real(x.view());
            let energy = fx.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst_energy = worst_energy.max((energy - xn).abs() / xn);
            let back = fft.inverse_real(fx);
            let err = back.iter().zip(x.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst_round = worst_round.max(err / xn);
        }
        self.check("fft/parseval", Ok(worst_energy), 1e-12);
        self.check("fft/inverse-identity", Ok(worst_round), 1e-12);
    }

    fn operators(&mut self) {
        let families = match self.families(16, 2) {
            Ok(f) => f,
            Err(e) => return self.record("operators/build", Err(e)),
        };
        for fam in &families {
            let adjoint = adjoint_error(&fam.op, 100, 2);
            self.check(format!("operators/adjoint/{}", fam.name), adjoint, 1e-10);
            let inverse = inverse_identity_error(&fam.op, 10, 3);
            self.check(format!("operators/inverse-identity/{}", fam.name), inverse, 1e-8);
        }
        for fam in families.iter().filter(|f| f.op.frame().is_none() && !f.name.starts_with("convolution")) {
            let sel = selection_error(&fam.op, 20, 4);
            self.check(format!("operators/selection-rows/{}", fam.name), sel, 1e-12);
        }
    }

    fn dense_oracles(&mut self) {
        let families = match self.families(8, 2) {
            Ok(f) => f,
            Err(e) => return self.record("dense-oracle/build", Err(e)),
        };
        for fam in &families {
            let err = dense_inverse_error(&fam.op, 5);
            self.check(format!("dense-oracle/{}", fam.name), err, 1e-8);
        }
    }

    fn frames(&mut self) {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for family in [FrameFamily::OrthogonalHaar, FrameFamily::UndecimatedHaar] {
            for levels in 1..=4 {
                let tag = format!("{}-L{levels}", family_name(family));
                let frame = match Frame::new(family, levels, (32, 32)) {
                    Ok(f) => f,
                    Err(e) => {
                        self.record(format!("frames/build/{tag}"), Err(e));
                        continue;
                    }
                };
                let x = gaussian(&mut rng, frame.image_len());
                let beta = gaussian(&mut rng, frame.coefficient_len());
                let recon = (|| {
                    let back = frame.synthesis_flat(frame.analysis_flat(x.view())?.view())?;
                    Ok(distance(back.iter().cloned().collect::<Array1<_>>().view(), x.view()) / norm(x.view()))
                })();
                self.check(format!("frames/parseval/{tag}"), recon, 1e-10);
                let energy = frame
                    .analysis_flat(x.view())
                    .map(|px| (norm(px.view()) - norm(x.view())).abs() / norm(x.view()));
                self.check(format!("frames/energy/{tag}"), energy, 1e-10);
                let pairing = (|| {
                    let lhs = dot(frame.analysis_flat(x.view())?.view(), beta.view());
                    let wb = flat(frame.synthesis_flat(beta.view())?);
                    let rhs = dot(x.view(), wb.view());
                    Ok((lhs - rhs).abs() / (norm(x.view()) * norm(beta.view())))
                })();
                self.check(format!("frames/adjoint-pairing/{tag}"), pairing, 1e-10);
                if family == FrameFamily::UndecimatedHaar {
                    let idem = (|| {
                        let q = |b: ArrayView1<f64>| -> Result<Array1<f64>> {
                            frame.analysis_flat(flat(frame.synthesis_flat(b)?).view())
                        };
                        let qb = q(beta.view())?;
                        let qqb = q(qb.view())?;
                        Ok(distance(qqb.view(), qb.view()) / norm(qb.view()))
                    })();
                    self.check(format!("frames/projector-idempotent/{tag}"), idem, 1e-10);
                }
            }
        }
    }

    fn prox(&mut self) {
        self.check("prox/soft-threshold-grid-oracle", soft_threshold_grid(), 2e-3);
        self.check("prox/ball-grid-oracle", ball_grid(), 2e-3);
        self.record("prox/l1-optimality", l1_optimality());
        self.check("prox/nonexpansive", nonexpansive(), 1e-12);
        self.record("prox/ball-idempotent", ball_idempotent());
        self.check("prox/tv-projected-gradient-oracle", tv_oracle_gap(), 1e-4);
        self.check("prox/tv-monotone-dual-objective", tv_monotone_increase(), 1e-10);
    }

    fn solver(&mut self) {
        let families = match self.families(16, 2) {
            Ok(f) => f,
            Err(e) => return self.record("solver/build", Err(e)),
        };
        for fam in families.iter().filter(|f| f.name.ends_with("analysis") || f.name.ends_with("undecimated")) {
            self.record(format!("solver/step-invariants/{}", fam.name), step_invariants(&fam.op));
        }
        self.record("solver/scalar-problem", scalar_problem());
    }

    fn harness(&mut self) {
        self.record("harness/reproducible-instances", reproducible_instances());
        self.record("harness/epsilon-consistency", epsilon_consistency());
        self.record("harness/counter-audit", counter_audit());
    }
}

fn family_name(f: FrameFamily) -> &'static str {
    match f {
        FrameFamily::OrthogonalHaar => "orthogonal",
        FrameFamily::UndecimatedHaar => "undecimated",
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    Array1::from_shape_fn(n, |_| rng.sample(StandardNormal))
}

fn gaussian_image(rng: &mut ChaCha8Rng, shape: (usize, usize)) -> Array2<f64> {
    Array2::from_shape_fn(shape, |_| rng.sample(StandardNormal))
}

fn flat(img: Array2<f64>) -> Array1<f64> {
    let n = img.len();
    img.into_shape_with_order(n).expect("contiguous")
}

/// Worst |⟨Ax, r⟩ − ⟨x, Aᴴr⟩| / (‖Ax‖‖r‖ + ‖x‖‖Aᴴr‖).
fn adjoint_error(op: &dyn LinearMap, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = gaussian(&mut rng, op.input_len());
        let r = gaussian(&mut rng, op.output_len());
        let ax = op.forward(x.view())?;
        let ar = op.adjoint(r.view())?;
        let gap = (dot(ax.view(), r.view()) - dot(x.view(), ar.view())).abs();
        let scale = norm(ax.view()) * norm(r.view()) + norm(x.view()) * norm(ar.view());
        worst = worst.max(gap / scale);
    }
    Ok(worst)
}

/// ‖(I + AᴴA) z − r‖ / ‖r‖ with z the closed-form inverse applied to r.
fn inverse_identity_error(op: &dyn ObservationOperator, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let r = gaussian(&mut rng, op.input_len());
        let z = op.shifted_normal_inverse(r.view())?;
        let back = &z + &op.adjoint(op.forward(z.view())?.view())?;
        worst = worst.max(distance(back.view(), r.view()) / norm(r.view()));
    }
    Ok(worst)
}

/// ‖B Bᴴ s − s‖ / ‖s‖. Pixel selections are tested on arbitrary s. Real
/// images only reach conjugate-symmetric Fourier data, on which Bᴴ keeps
/// the real part, so there s ranges over the image of B.
fn selection_error(op: &LinearOperatorSpec, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let s = match op.kind() {
            OperatorKind::PartialFourier(_) => op.forward(gaussian(&mut rng, op.input_len()).view())?,
            _ => gaussian(&mut rng, op.output_len()),
        };
        let back = op.forward(op.adjoint(s.view())?.view())?;
        worst = worst.max(distance(back.view(), s.view()) / norm(s.view()));
    }
    Ok(worst)
}

/// The matrix of a linear map, one forward call per column.
pub fn materialize(op: &dyn LinearMap) -> Result<DMatrix<f64>> {
    let (m, n) = (op.output_len(), op.input_len());
    let mut a = DMatrix::zeros(m, n);
    let mut e = Array1::zeros(n);
    for j in 0..n {
        e[j] = 1.0;
        let col = op.forward(e.view())?;
        for (i, v) in col.iter().enumerate() {
            a[(i, j)] = *v;
        }
        e[j] = 0.0;
    }
    Ok(a)
}

/// Relative error of the closed-form inverse against a Cholesky solve of
/// the materialised I + AᵀA.
fn dense_inverse_error(op: &dyn ObservationOperator, trials: usize) -> Result<f64> {
    let a = materialize(op)?;
    let n = a.ncols();
    let normal = DMatrix::identity(n, n) + a.transpose() * &a;
    let chol = normal.cholesky().expect("I + AᵀA is positive definite");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let r = gaussian(&mut rng, n);
        let fast = op.shifted_normal_inverse(r.view())?;
        let exact = chol.solve(&DVector::from_iterator(n, r.iter().cloned()));
        let err = fast.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(err / exact.norm());
    }
    Ok(worst)
}

/// Minimiser of a 1-D function over a uniform grid.
fn grid_argmin(lo: f64, hi: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    let steps = ((hi - lo) / step).ceil() as usize;
    (0..=steps)
        .map(|i| lo + i as f64 * step)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .expect("non-empty grid")
}

fn soft_threshold_grid() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(y, tau) in &[(3.0, 1.0), (-2.5, 0.7), (0.4, 1.0), (-0.2, 0.05), (10.0, 0.0), (1.0, 1.0)] {
        let z = soft_threshold(Array1::from_elem(1, y).view(), tau)?[0];
        let g = grid_argmin(-12.0, 12.0, 1e-3, |x| 0.5 * (x - y) * (x - y) + tau * x.abs());
        worst = worst.max((z - g).abs());
    }
    Ok(worst)
}

fn ball_grid() -> Result<f64> {
    let centre = Array1::from(vec![0.5, -1.0]);
    let ball = BallConstraint::new(centre.clone(), 1.0)?;
    let step = 2e-3;
    let cells = (2.0 / step) as usize;
    let mut worst: f64 = 0.0;
    for s in [[3.0, 4.0], [0.7, -0.8], [-2.0, -1.0], [0.5, 2.0]] {
        let s = Array1::from(s.to_vec());
        let p = ball.project(s.view())?;
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for i in 0..=cells {
            for j in 0..=cells {
                let x = [centre[0] - 1.0 + i as f64 * step, centre[1] - 1.0 + j as f64 * step];
                if (x[0] - centre[0]).hypot(x[1] - centre[1]) > 1.0 {
                    continue;
                }
                let f = (x[0] - s[0]).powi(2) + (x[1] - s[1]).powi(2);
                if f < best.0 {
                    best = (f, x);
                }
            }
        }
        worst = worst.max((p[0] - best.1[0]).hypot(p[1] - best.1[1]));
    }
    Ok(worst)
}

fn l1_optimality() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tau = 0.8;
    let v = gaussian(&mut rng, 50) * 2.0;
    let z = soft_threshold(v.view(), tau)?;
    let objective = |x: &Array1<f64>| 0.5 * distance(x.view(), v.view()).powi(2) + tau * x.mapv(f64::abs).sum();
    let base = objective(&z);
    let mut violations = 0;
    for _ in 0..100 {
        let mut delta = gaussian(&mut rng, 50);
        let len = norm(delta.view());
        delta *= 1e-3 / len;
        if objective(&(&z + &delta)) < base {
            violations += 1;
        }
    }
    Ok((violations == 0, format!("{violations} of 100 perturbations improved the objective")))
}

fn nonexpansive() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ball = BallConstraint::new(gaussian(&mut rng, 20), 1.5)?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..200 {
        let a = gaussian(&mut rng, 20) * 3.0;
        let b = gaussian(&mut rng, 20) * 3.0;
        let gap = distance(a.view(), b.view());
        let soft = distance(soft_threshold(a.view(), 0.6)?.view(), soft_threshold(b.view(), 0.6)?.view());
        let proj = distance(ball.project(a.view())?.view(), ball.project(b.view())?.view());
        worst = worst.max(soft.max(proj) - gap);
    }
    Ok(worst.max(0.0))
}

fn ball_idempotent() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ball = BallConstraint::new(gaussian(&mut rng, 30), 2.0)?;
    let mut mismatches = 0;
    for _ in 0..200 {
        let s = gaussian(&mut rng, 30) * 4.0;
        let p = ball.project(s.view())?;
        if ball.project(p.view())? != p {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{mismatches} of 200 projections moved on reapplication")))
}

/// The forward-difference gradient as a dense 2n×n matrix: rows of ∂ᵢ
/// first, then ∂ⱼ, zero across the last row and column.
fn dense_gradient(h: usize, w: usize) -> DMatrix<f64> {
    let n = h * w;
    let mut g = DMatrix::zeros(2 * n, n);
    for i in 0..h {
        for j in 0..w {
            let p = i * w + j;
            if i + 1 < h {
                g[(p, p)] = -1.0;
                g[(p, p + w)] = 1.0;
            }
            if j + 1 < w {
                g[(n + p, p)] = -1.0;
                g[(n + p, p + 1)] = 1.0;
            }
        }
    }
    g
}

fn dense_tv_objective(g: &DMatrix<f64>, x: &DVector<f64>, v: &DVector<f64>, tau: f64) -> f64 {
    let n = x.len();
    let gx = g * x;
    let tv: f64 = (0..n).map(|p| gx[p].hypot(gx[n + p])).sum();
    0.5 * (x - v).norm_squared() + tau * tv
}

/// Gap between 200 Chambolle iterations and projected gradient on the dual
/// min ½‖v − τGᵀp‖² s.t. |pₚ| ≤ 1 run for 10⁵ iterations.
fn tv_oracle_gap() -> Result<f64> {
    let (h, w) = (4, 4);
    let g = dense_gradient(h, w);
    let gt = g.transpose();
    let n = h * w;
    let tau = 0.25;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let v_img = gaussian_image(&mut rng, (h, w));
        let v = DVector::from_iterator(n, v_img.iter().cloned());
        let mut p = DVector::zeros(2 * n);
        let step = 1.0 / (8.0 * tau * tau);
        for _ in 0..100_000 {
            let x = &v - tau * (&gt * &p);
            p += step * tau * (&g * &x);
            for q in 0..n {
                let m = p[q].hypot(p[n + q]);
                if m > 1.0 {
                    p[q] /= m;
                    p[n + q] /= m;
                }
            }
        }
        let oracle = &v - tau * (&gt * &p);
        let x = tv_prox(v_img.view(), tau, &TvSettings::new(200))?;
        let ours = DVector::from_iterator(n, x.iter().cloned());
        let gap = dense_tv_objective(&g, &ours, &v, tau) - dense_tv_objective(&g, &oracle, &v, tau);
        worst = worst.max(gap.abs());
    }
    Ok(worst)
}

/// Largest per-step increase of ½‖v − τ div p‖² = ½‖x‖² along the Chambolle
/// iterates with step 1/8. This dual objective is the quantity the step
/// bound makes monotone; the primal ½‖x − v‖² + τ TV(x) can rise between
/// inner iterations.
fn tv_monotone_increase() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for &tau in &[0.3, 0.7, 1.0, 2.5] {
        let v = gaussian_image(&mut rng, (12, 12));
        let mut previous = f64::INFINITY;
        for k in 1..=60 {
            let settings = TvSettings {
                dual_step: 0.125,
                ..TvSettings::new(k)
            };
            let x = tv_prox(v.view(), tau, &settings)?;
            let f = 0.5 * x.iter().map(|a| a * a).sum::<f64>();
            worst = worst.max(f - previous);
            previous = f;
        }
    }
    Ok(worst)
}

/// Runs C-SALSA steps by hand and checks the dual update, feasibility of
/// the ball block, optimality of the u-update and μ-invariance of the
/// projection at every step.
fn step_invariants(op: &LinearOperatorSpec) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let truth = gaussian(&mut rng, op.input_len());
    let clean = op.forward(truth.view())?;
    let y = &clean + &(gaussian(&mut rng, clean.len()) * 0.05);
    let epsilon = epsilon_rule(y.len(), 0.05)?;
    let ball = BallConstraint::new(y.clone(), epsilon)?;

    let identity = Identity(op.input_len());
    let analysis;
    let first: &dyn LinearMap = match op.frame() {
        None => {
            let frame = Frame::new(FrameFamily::OrthogonalHaar, 2, op.image_shape())?;
            analysis = FrameAnalysis(frame);
            &analysis
        }
        Some(_) => &identity,
    };
    let blocks = vec![Block::new(first, L1Norm), Block::new(op as &dyn LinearMap, ball.clone())];
    let mut split = SplitSpec::new(blocks, |r| op.shifted_normal_inverse(r))?;
    let config = SolverConfig {
        epsilon,
        mu: 0.7,
        ..SolverConfig::default()
    };
    let mut state = SolverState::zeros(&split);

    let mut dual_mismatch = 0;
    let mut worst_feasibility: f64 = 0.0;
    let mut worst_gradient: f64 = 0.0;
    let mut mu_mismatch = 0;
    for _ in 0..15 {
        let before = state.clone();
        let zeta: Vec<Array1<f64>> = before.v.iter().zip(&before.d).map(|(v, d)| v + d).collect();
        admm2_step(&mut state, &mut split, &config)?;

        for j in 0..2 {
            let recomputed = &before.d[j] - &state.hu[j] + &state.v[j];
            if recomputed != state.d[j] {
                dual_mismatch += 1;
            }
        }
        worst_feasibility = worst_feasibility.max(distance(state.v[1].view(), y.view()) / epsilon - 1.0);

        let mut gradient = Array1::zeros(op.input_len());
        for (b, z) in split.blocks().iter().zip(&zeta) {
            let hu = b.map.forward(state.u.view())?;
            gradient += &b.map.adjoint((&hu - z).view())?;
        }
        let zeta_norm = zeta.iter().map(|z| norm(z.view()).powi(2)).sum::<f64>().sqrt();
        if zeta_norm > 0.0 {
            worst_gradient = worst_gradient.max(norm(gradient.view()) / zeta_norm);
        }

        let s = &state.hu[1] - &state.d[1];
        let mut probe = ball.clone();
        let reference = probe.prox(s.view(), 1.0)?;
        for mu in [0.1, 10.0] {
            if probe.prox(s.view(), mu)? != reference {
                mu_mismatch += 1;
            }
        }
    }
    let passed = dual_mismatch == 0 && worst_feasibility <= 1e-12 && worst_gradient <= 1e-8 && mu_mismatch == 0;
    Ok((
        passed,
        format!(
            "dual mismatches {dual_mismatch}, feasibility excess {worst_feasibility:.1e}, \
             gradient residual {worst_gradient:.1e}, mu mismatches {mu_mismatch}"
        ),
    ))
}

/// min |x| s.t. |x − 5| ≤ 1 has solution 4.
fn scalar_problem() -> Result<(bool, String)> {
    let op = LinearOperatorSpec::pixel_mask(Array2::from_elem((1, 1), true))?;
    let y = op.observation(Array1::from_elem(1, 5.0))?;
    let mut worst: f64 = 0.0;
    let mut most_iterations = 0;
    for mu in [0.1, 1.0, 10.0] {
        let config = SolverConfig {
            mu,
            epsilon: 1.0,
            max_iterations: 200,
            objective_rel_tol: 1e-12,
            feasibility_slack: 0.0,
            ..SolverConfig::default()
        };
        let out = csalsa1(&op, &y, &crate::prox::Regularizer::L1, &config, None)?;
        worst = worst.max((out.solution[0] - 4.0).abs());
        most_iterations = most_iterations.max(out.iterations());
    }
    Ok((
        worst <= 1e-6 && most_iterations <= 200,
        format!("worst error {worst:.1e}, at most {most_iterations} iterations"),
    ))
}

fn small_config(kind: ExperimentKind, seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.size = Some(32);
    c.lines = Some(10);
    c.seed = seed;
    c
}

fn reproducible_instances() -> Result<(bool, String)> {
    let mut differing = Vec::new();
    for kind in ExperimentKind::ALL {
        let a = ProblemInstance::from_config(&small_config(kind, 3))?;
        let b = ProblemInstance::from_config(&small_config(kind, 3))?;
        let same = a.observation.values().iter().map(|v| v.to_bits()).eq(b.observation.values().iter().map(|v| v.to_bits()));
        if !same {
            differing.push(kind.name());
        }
    }
    Ok((differing.is_empty(), format!("non-reproducible: {differing:?}")))
}

/// ‖B x − y‖ ≤ 1.2 ε across 20 seeds for every experiment.
fn epsilon_consistency() -> Result<(bool, String)> {
    let mut failures = 0;
    let mut worst_ratio: f64 = 0.0;
    for kind in ExperimentKind::ALL {
        for seed in 0..20 {
            let inst = ProblemInstance::from_config(&small_config(kind, seed))?;
            let clean = inst.clean_observation()?;
            let ratio = distance(clean.view(), inst.observation.view()) / inst.epsilon;
            worst_ratio = worst_ratio.max(ratio);
            if ratio > 1.2 {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("{failures} of 160 instances above 1.2 eps, worst ratio {worst_ratio:.3}")))
}

fn counter_audit() -> Result<(bool, String)> {
    let mut c = small_config(ExperimentKind::Deblur2A, 1);
    c.size = Some(16);
    c.iterations = Some(12);
    let inst = ProblemInstance::from_config(&c)?;
    let choice = c.solver_choice(inst.truth.dim())?;
    let config = SolverConfig {
        epsilon: inst.epsilon,
        ..c.solver_config()
    };
    let counted = run_experiment(&inst, &choice, &config)?;
    let crate::harness::SolverChoice::Tv(settings) = choice else {
        unreachable!("deblurring defaults to TV")
    };
    let plain = csalsa1(
        &inst.operator,
        &inst.observation,
        &crate::prox::Regularizer::IsotropicTv(settings),
        &config,
        Some(inst.truth.view()),
    )?;
    let same_estimate = counted.estimate == plain.estimate;
    let same_history = counted
        .history
        .iter()
        .zip(&plain.state.history)
        .all(|(a, b)| (a.objective, a.constraint_norm, a.primal_residual, a.mse) == (b.objective, b.constraint_norm, b.primal_residual, b.mse));
    // A warm start spends one adjoint on Aᴴy and one forward seeding v.
    let setup = if config.warm_start { 2 } else { 0 };
    let expected_calls = 2 * counted.iterations + setup;
    let calls_ok = counted.calls.operator_calls == expected_calls;
    Ok((
        same_estimate && same_history && calls_ok,
        format!(
            "identical outputs {}, {} operator calls over {} iterations",
            same_estimate && same_history,
            counted.calls.operator_calls,
            counted.iterations
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let report = run_suite(&ValidateOptions::default());
        let failures: Vec<_> = report.failures().collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }

    #[test]
    fn corrupted_fft_scale_is_caught() {
        let report = run_suite(&ValidateOptions { fft_scale_error: 1.1 });
        let failed: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        assert!(failed.contains(&"fft/parseval"));
        assert!(failed.contains(&"fft/inverse-identity"));
        assert!(failed.iter().any(|n| n.starts_with("operators/inverse-identity/fourier")));
        assert!(failed.iter().any(|n| n.starts_with("dense-oracle/fourier")));
        assert!(failed.iter().any(|n| n.starts_with("dense-oracle/convolution")));
        assert!(!failed.iter().any(|n| n.starts_with("operators/adjoint")));
    }
}
