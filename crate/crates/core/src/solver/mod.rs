//! ADMM for objectives Σⱼ gⱼ(H⁽ʲ⁾u) with a stacked least-squares u-update,
//! and its two instantiations for min φ s.t. ‖Bu − y‖₂ ≤ ε.

mod admm;
mod csalsa;
mod stop;

use std::time::Instant;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

pub use admm::{admm2_step, Block, SplitSpec};
pub use csalsa::{csalsa1, csalsa2, SolveOutput};
pub use stop::{check_stop, StopDecision, STAGNATION_WINDOW};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Augmented-Lagrangian penalty μ.
    pub mu: f64,
    /// Constraint radius ε.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Feasibility is declared at ‖Bu − y‖ ≤ (1 + slack) ε.
    pub feasibility_slack: f64,
    /// Relative change of the objective over the stagnation window.
    pub objective_rel_tol: f64,
    /// Keep every iteration record (otherwise only the stagnation window).
    pub record_history: bool,
    /// Start from u₀ = Aᴴy instead of u₀ = 0.
    pub warm_start: bool,
    /// Keep a copy of every iterate u_k. Debug only; O(n) memory per iteration.
    pub snapshot_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mu: 1.0,
            epsilon: 0.0,
            max_iterations: 500,
            feasibility_slack: 0.01,
            objective_rel_tol: 1e-4,
            record_history: true,
            warm_start: false,
            snapshot_iterates: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::Config(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.feasibility_slack >= 0.0) || !(self.objective_rel_tol >= 0.0) {
            return Err(Error::Config("tolerances must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// φ(H⁽¹⁾u_k).
    pub objective: f64,
    /// ‖Bu_k − y‖₂.
    pub constraint_norm: f64,
    /// ‖Gu_k − v_k‖₂.
    pub primal_residual: f64,
    pub wall_time: f64,
    pub mse: Option<f64>,
}

/// Iterates of the split solver. `v[j]`, `d[j]` and `hu[j]` live in the
/// range of H⁽ʲ⁾; `hu[j]` caches H⁽ʲ⁾u_k from the last step.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub u: Array1<f64>,
    pub v: Vec<Array1<f64>>,
    pub d: Vec<Array1<f64>>,
    pub hu: Vec<Array1<f64>>,
    pub k: usize,
    pub history: Vec<IterationRecord>,
    pub snapshots: Vec<Array1<f64>>,
    started: Instant,
}

impl SolverState {
    /// v⁽ʲ⁾ = d⁽ʲ⁾ = 0.
    pub fn zeros(split: &SplitSpec<'_>) -> Self {
        let v: Vec<_> = split.blocks().iter().map(|b| Array1::zeros(b.map.output_len())).collect();
        SolverState {
            u: Array1::zeros(split.domain_len()),
            d: v.clone(),
            hu: v.clone(),
            v,
            k: 0,
            history: Vec::new(),
            snapshots: Vec::new(),
            started: Instant::now(),
        }
    }

    /// v⁽ʲ⁾ = H⁽ʲ⁾u₀, d⁽ʲ⁾ = 0, so the first u-update returns u₀.
    pub fn warm(split: &SplitSpec<'_>, u0: Array1<f64>) -> Result<Self> {
        if u0.len() != split.domain_len() {
            return Err(Error::shape("initial estimate", split.domain_len(), u0.len()));
        }
        let v = split
            .blocks()
            .iter()
            .map(|b| b.map.forward(u0.view()))
            .collect::<Result<Vec<_>>>()?;
        Ok(SolverState {
            d: v.iter().map(|x| Array1::zeros(x.len())).collect(),
            hu: v.clone(),
            v,
            u: u0,
            k: 0,
            history: Vec::new(),
            snapshots: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn last_record(&self) -> Option<&IterationRecord> {
        self.history.last()
    }

    pub fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }
}
