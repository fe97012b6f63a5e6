//! The constrained solvers: ADMM-2 with J = 2,
//! g₁ = φ on H⁽¹⁾u and g₂ the indicator of the ε-ball around y on Bu.
//!
//! * [`csalsa1`]: H⁽¹⁾ = I. With a frame-composed operator the unknown is
//!   β and the estimate is Wβ.
//! * [`csalsa2`]: H⁽¹⁾ = P, the analysis operator of a Parseval frame, so
//!   PᴴP + BᴴB = I + BᴴB and the same closed-form inverse applies.

use ndarray::{Array1, Array2, ArrayView2};

use super::{admm2_step, check_stop, Block, SolverConfig, SolverState, SplitSpec, StopDecision};
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::operators::{flatten, FrameAnalysis, Identity, LinearMap, Observation, ObservationOperator};
use crate::prox::{BallConstraint, L1Norm, Regularizer, TotalVariation};

#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// The image estimate (Wu in synthesis mode).
    pub estimate: Array2<f64>,
    /// The final u: an image or a coefficient vector.
    pub solution: Array1<f64>,
    pub state: SolverState,
    pub decision: StopDecision,
}

impl SolveOutput {
    pub fn iterations(&self) -> usize {
        self.state.k
    }
}

/// min φ(u) s.t. ‖Au − y‖₂ ≤ ε, with A the operator as given (B or BW).
pub fn csalsa1(
    op: &dyn ObservationOperator,
    y: &Observation,
    reg: &Regularizer,
    config: &SolverConfig,
    truth: Option<ArrayView2<f64>>,
) -> Result<SolveOutput> {
    check_inputs(op, y, config)?;
    let n = op.input_len();
    let identity = Identity(n);
    let first = match reg {
        Regularizer::L1 => Block::new(&identity, L1Norm),
        Regularizer::IsotropicTv(settings) => {
            if op.frame().is_some() {
                return Err(Error::Capability(
                    "total variation applies to images, not frame coefficients".into(),
                ));
            }
            Block::new(&identity, TotalVariation::new(*settings, op.image_shape()))
        }
    };
    let ball = BallConstraint::new(y.values().clone(), config.epsilon)?;
    let blocks = vec![first, Block::new(op as &dyn LinearMap, ball)];
    let split = SplitSpec::new(blocks, |r| op.shifted_normal_inverse(r))?;
    run(op, split, y, config, truth)
}

/// min φ(Pu) s.t. ‖Bu − y‖₂ ≤ ε for a Parseval analysis operator P.
pub fn csalsa2(
    op: &dyn ObservationOperator,
    frame: &Frame,
    y: &Observation,
    reg: &Regularizer,
    config: &SolverConfig,
    truth: Option<ArrayView2<f64>>,
) -> Result<SolveOutput> {
    check_inputs(op, y, config)?;
    if op.frame().is_some() {
        return Err(Error::Capability(
            "the analysis formulation needs an operator acting on images".into(),
        ));
    }
    if frame.image_shape() != op.image_shape() {
        return Err(Error::shape(
            "frame image shape",
            format!("{:?}", op.image_shape()),
            format!("{:?}", frame.image_shape()),
        ));
    }
    if !matches!(reg, Regularizer::L1) {
        return Err(Error::Capability(
            "the analysis formulation supports the l1 regularizer on frame coefficients".into(),
        ));
    }
    let analysis = FrameAnalysis(*frame);
    let ball = BallConstraint::new(y.values().clone(), config.epsilon)?;
    let blocks = vec![
        Block::new(&analysis, L1Norm),
        Block::new(op as &dyn LinearMap, ball),
    ];
    let split = SplitSpec::new(blocks, |r| op.shifted_normal_inverse(r))?;
    run(op, split, y, config, truth)
}

fn check_inputs(op: &dyn ObservationOperator, y: &Observation, config: &SolverConfig) -> Result<()> {
    config.validate()?;
    if y.kind() != op.sample_kind() || y.values().len() != op.output_len() {
        return Err(Error::shape("observation", op.output_len(), y.values().len()));
    }
    Ok(())
}

fn run(
    op: &dyn ObservationOperator,
    split: SplitSpec<'_>,
    y: &Observation,
    config: &SolverConfig,
    truth: Option<ArrayView2<f64>>,
) -> Result<SolveOutput> {
    let mut split = match truth {
        Some(t) => {
            if t.dim() != op.image_shape() {
                return Err(Error::shape(
                    "ground truth",
                    format!("{:?}", op.image_shape()),
                    format!("{:?}", t.dim()),
                ));
            }
            let t = flatten(t.to_owned());
            split.with_truth(t, move |u| op.to_image(u).map(flatten))
        }
        None => split,
    };

    let mut state = if config.warm_start {
        let u0 = op.adjoint(y.view())?;
        SolverState::warm(&split, u0)?
    } else {
        SolverState::zeros(&split)
    };

    let decision = loop {
        admm2_step(&mut state, &mut split, config)?;
        match check_stop(&state.history, config) {
            StopDecision::Continue => continue,
            done => break done,
        }
    };

    let estimate = op.to_image(state.u.view())?;
    Ok(SolveOutput {
        estimate,
        solution: state.u.clone(),
        state,
        decision,
    })
}
