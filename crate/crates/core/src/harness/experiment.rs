use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use super::metrics::{isnr, mse, Isnr};
use crate::error::Result;
use crate::frames::{Frame, FrameFamily};
use crate::operators::{LinearMap, ObservationOperator, SampleKind};
use crate::prox::{Regularizer, TvSettings};
use crate::solver::{csalsa1, csalsa2, IterationRecord, SolverConfig, StopDecision};

/// The regularizer and the solver that goes with it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverChoice {
    /// Isotropic TV on the image, H⁽¹⁾ = I.
    Tv(TvSettings),
    /// ‖β‖₁ with x = Wβ, operator BW, H⁽¹⁾ = I.
    Synthesis(Frame),
    /// ‖Px‖₁, H⁽¹⁾ = P.
    Analysis(Frame),
}

impl SolverChoice {
    pub fn describe(&self) -> SolverDescription {
        let frame = |f: &Frame| FrameDescription {
            family: f.family(),
            levels: f.levels(),
        };
        match self {
            SolverChoice::Tv(s) => SolverDescription {
                solver: "c-salsa-1",
                regularizer: "tv",
                tv: Some(*s),
                frame: None,
            },
            SolverChoice::Synthesis(f) => SolverDescription {
                solver: "c-salsa-1",
                regularizer: "l1-synthesis",
                tv: None,
                frame: Some(frame(f)),
            },
            SolverChoice::Analysis(f) => SolverDescription {
                solver: "c-salsa-2",
                regularizer: "l1-analysis",
                tv: None,
                frame: Some(frame(f)),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverDescription {
    pub solver: &'static str,
    pub regularizer: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv: Option<TvSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameDescription>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameDescription {
    pub family: FrameFamily,
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallCounts {
    pub forward: usize,
    pub adjoint: usize,
    /// Applications of (I + AᴴA)⁻¹. Not included in `operator_calls`.
    pub inverse: usize,
    /// forward + adjoint.
    pub operator_calls: usize,
}

/// Delegates to an operator while counting forward, adjoint and inverse
/// applications. Counting never changes the results.
pub struct CountingOperator<'a> {
    inner: &'a dyn ObservationOperator,
    forward: AtomicUsize,
    adjoint: AtomicUsize,
    inverse: AtomicUsize,
}

impl<'a> CountingOperator<'a> {
    pub fn new(inner: &'a dyn ObservationOperator) -> Self {
        CountingOperator {
            inner,
            forward: AtomicUsize::new(0),
            adjoint: AtomicUsize::new(0),
            inverse: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> CallCounts {
        let forward = self.forward.load(Ordering::Relaxed);
        let adjoint = self.adjoint.load(Ordering::Relaxed);
        CallCounts {
            forward,
            adjoint,
            inverse: self.inverse.load(Ordering::Relaxed),
            operator_calls: forward + adjoint,
        }
    }
}

impl LinearMap for CountingOperator<'_> {
    fn input_len(&self) -> usize {
        self.inner.input_len()
    }

    fn output_len(&self) -> usize {
        self.inner.output_len()
    }

    fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.forward.fetch_add(1, Ordering::Relaxed);
        self.inner.forward(x)
    }

    fn adjoint(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.adjoint.fetch_add(1, Ordering::Relaxed);
        self.inner.adjoint(r)
    }

    fn injective_by_construction(&self) -> bool {
        self.inner.injective_by_construction()
    }
}

impl ObservationOperator for CountingOperator<'_> {
    fn shifted_normal_inverse(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.inverse.fetch_add(1, Ordering::Relaxed);
        self.inner.shifted_normal_inverse(r)
    }

    fn sample_kind(&self) -> SampleKind {
        self.inner.sample_kind()
    }

    fn image_shape(&self) -> (usize, usize) {
        self.inner.image_shape()
    }

    fn frame(&self) -> Option<Frame> {
        self.inner.frame()
    }

    fn to_image(&self, u: ArrayView1<f64>) -> Result<Array2<f64>> {
        self.inner.to_image(u)
    }
}

/// Outcome of one solve, with everything the report files need.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub solver: SolverDescription,
    pub settings: SolverConfig,
    pub sigma: f64,
    pub epsilon: f64,
    pub observations: usize,
    pub seed: u64,
    pub iterations: usize,
    pub decision: StopDecision,
    pub feasible: bool,
    pub calls: CallCounts,
    pub final_mse: f64,
    pub final_constraint_norm: f64,
    pub final_objective: f64,
    /// ‖x̂ − x‖ / ‖x‖.
    pub relative_error: f64,
    pub degraded_mse: f64,
    pub isnr: Isnr,
    pub runtime_s: f64,
    #[serde(skip)]
    pub history: Vec<IterationRecord>,
    #[serde(skip)]
    pub estimate: Array2<f64>,
}

impl ExperimentReport {
    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} after {} iterations, mse {:.4e}, constraint {:.4e} (eps {:.4e})",
            self.name,
            match self.decision {
                StopDecision::Converged => "converged",
                StopDecision::Exhausted => "exhausted",
                StopDecision::Continue => "running",
            },
            self.iterations,
            self.final_mse,
            self.final_constraint_norm,
            self.epsilon,
        )
    }
}

/// Solves `instance` behind a counting wrapper. The constraint radius is
/// always the instance's ε; `config.epsilon` is ignored.
pub fn run_experiment(
    instance: &ProblemInstance,
    choice: &SolverChoice,
    config: &SolverConfig,
) -> Result<ExperimentReport> {
    let config = SolverConfig {
        epsilon: instance.epsilon,
        ..config.clone()
    };
    let started = Instant::now();
    let truth = Some(instance.truth.view());
    let y = &instance.observation;

    let (output, calls) = match choice {
        SolverChoice::Tv(settings) => {
            let op = CountingOperator::new(&instance.operator);
            let out = csalsa1(&op, y, &Regularizer::IsotropicTv(*settings), &config, truth)?;
            (out, op.counts())
        }
        SolverChoice::Synthesis(frame) => {
            let composed = instance.operator.clone().with_frame(*frame)?;
            let op = CountingOperator::new(&composed);
            let out = csalsa1(&op, y, &Regularizer::L1, &config, truth)?;
            (out, op.counts())
        }
        SolverChoice::Analysis(frame) => {
            let op = CountingOperator::new(&instance.operator);
            let out = csalsa2(&op, frame, y, &Regularizer::L1, &config, truth)?;
            (out, op.counts())
        }
    };

    let runtime_s = started.elapsed().as_secs_f64();
    let estimate = output.estimate;
    let last = output.state.last_record().cloned().expect("at least one iteration ran");
    let degraded = instance.degraded_image()?;
    let truth_norm = instance.truth.iter().map(|v| v * v).sum::<f64>().sqrt();
    let err_norm = estimate
        .iter()
        .zip(instance.truth.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();

    Ok(ExperimentReport {
        name: instance.name.clone(),
        solver: choice.describe(),
        settings: config.clone(),
        sigma: instance.sigma,
        epsilon: instance.epsilon,
        observations: instance.observations(),
        seed: instance.seed,
        iterations: output.state.k,
        decision: output.decision,
        feasible: last.constraint_norm <= (1.0 + config.feasibility_slack) * config.epsilon,
        calls,
        final_mse: mse(estimate.view(), instance.truth.view())?,
        final_constraint_norm: last.constraint_norm,
        final_objective: last.objective,
        relative_error: if truth_norm > 0.0 { err_norm / truth_norm } else { err_norm },
        degraded_mse: mse(degraded.view(), instance.truth.view())?,
        isnr: isnr(degraded.view(), estimate.view(), instance.truth.view())?,
        runtime_s,
        history: output.state.history,
        estimate,
    })
}
