use ndarray::{Array1, ArrayView1};

use super::{IterationRecord, SolverConfig, SolverState, STAGNATION_WINDOW};
use crate::error::{Error, Result};
use crate::operators::LinearMap;
use crate::prox::{ProximalFunction, Role};
use crate::vector::{all_finite, distance, norm_sq};

/// One term gⱼ(H⁽ʲ⁾u) of the split objective.
pub struct Block<'a> {
    pub map: &'a dyn LinearMap,
    pub function: Box<dyn ProximalFunction + 'a>,
}

impl<'a> Block<'a> {
    pub fn new(map: &'a dyn LinearMap, function: impl ProximalFunction + 'a) -> Self {
        Block {
            map,
            function: Box::new(function),
        }
    }
}

type Inverse<'a> = Box<dyn Fn(ArrayView1<f64>) -> Result<Array1<f64>> + 'a>;
type ToImage<'a> = Box<dyn Fn(ArrayView1<f64>) -> Result<Array1<f64>> + 'a>;

/// The stacked operator G = [H⁽¹⁾; …; H⁽ᴶ⁾], the block functions, and the
/// closed-form applier of [Σⱼ H⁽ʲ⁾ᴴH⁽ʲ⁾]⁻¹.
pub struct SplitSpec<'a> {
    blocks: Vec<Block<'a>>,
    normal_inverse: Inverse<'a>,
    truth: Option<(Array1<f64>, ToImage<'a>)>,
}

impl<'a> SplitSpec<'a> {
    pub fn new(
        blocks: Vec<Block<'a>>,
        normal_inverse: impl Fn(ArrayView1<f64>) -> Result<Array1<f64>> + 'a,
    ) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(Error::domain("split needs at least one block"));
        };
        let n = first.map.input_len();
        if let Some(b) = blocks.iter().find(|b| b.map.input_len() != n) {
            return Err(Error::shape("block domain", n, b.map.input_len()));
        }
        if !blocks.iter().any(|b| b.map.injective_by_construction()) {
            return Err(Error::domain(
                "stacked operator must have full column rank: no block is injective by construction",
            ));
        }
        Ok(SplitSpec {
            blocks,
            normal_inverse: Box::new(normal_inverse),
            truth: None,
        })
    }

    /// Records MSE against `truth` (an image, flattened) each iteration;
    /// `to_image` maps u to the image estimate.
    pub fn with_truth(
        mut self,
        truth: Array1<f64>,
        to_image: impl Fn(ArrayView1<f64>) -> Result<Array1<f64>> + 'a,
    ) -> Self {
        self.truth = Some((truth, Box::new(to_image)));
        self
    }

    pub fn blocks(&self) -> &[Block<'a>] {
        &self.blocks
    }

    pub fn domain_len(&self) -> usize {
        self.blocks[0].map.input_len()
    }

    /// [Σ H⁽ʲ⁾ᴴH⁽ʲ⁾]⁻¹ r.
    pub fn apply_normal_inverse(&self, r: ArrayView1<f64>) -> Result<Array1<f64>> {
        (self.normal_inverse)(r)
    }

    /// Σⱼ H⁽ʲ⁾ᴴ ζ⁽ʲ⁾.
    pub fn stacked_adjoint(&self, zeta: &[Array1<f64>]) -> Result<Array1<f64>> {
        let mut acc = Array1::zeros(self.domain_len());
        for (b, z) in self.blocks.iter().zip(zeta) {
            acc += &b.map.adjoint(z.view())?;
        }
        Ok(acc)
    }

    fn check_state(&self, state: &SolverState) -> Result<()> {
        if state.u.len() != self.domain_len() {
            return Err(Error::shape("solver state u", self.domain_len(), state.u.len()));
        }
        let j = self.blocks.len();
        if state.v.len() != j || state.d.len() != j || state.hu.len() != j {
            return Err(Error::shape("solver state blocks", j, state.v.len()));
        }
        for (b, (v, d)) in self.blocks.iter().zip(state.v.iter().zip(&state.d)) {
            let p = b.map.output_len();
            if v.len() != p || d.len() != p {
                return Err(Error::shape("solver state block", p, v.len()));
            }
        }
        Ok(())
    }
}

/// One outer iteration:
///
/// ζ⁽ʲ⁾ = v⁽ʲ⁾ + d⁽ʲ⁾,
/// u ← [Σ H⁽ʲ⁾ᴴH⁽ʲ⁾]⁻¹ Σ H⁽ʲ⁾ᴴ ζ⁽ʲ⁾,
/// v⁽ʲ⁾ ← Ψ_{gⱼ/μ}(H⁽ʲ⁾u − d⁽ʲ⁾),
/// d⁽ʲ⁾ ← d⁽ʲ⁾ − H⁽ʲ⁾u + v⁽ʲ⁾.
///
/// The state is only committed if every new iterate is finite.
pub fn admm2_step(state: &mut SolverState, split: &mut SplitSpec<'_>, config: &SolverConfig) -> Result<()> {
    split.check_state(state)?;

    let zeta: Vec<Array1<f64>> = state.v.iter().zip(&state.d).map(|(v, d)| v + d).collect();
    let rhs = split.stacked_adjoint(&zeta)?;
    let u = split.apply_normal_inverse(rhs.view())?;

    let j = split.blocks.len();
    let mut hu = Vec::with_capacity(j);
    let mut v = Vec::with_capacity(j);
    let mut d = Vec::with_capacity(j);
    for (b, d_old) in split.blocks.iter_mut().zip(&state.d) {
        let h = b.map.forward(u.view())?;
        let s = &h - d_old;
        let v_new = b.function.prox(s.view(), config.mu)?;
        let d_new = d_old - &h + &v_new;
        hu.push(h);
        v.push(v_new);
        d.push(d_new);
    }

    let finite = all_finite(u.view())
        && v.iter().all(|x| all_finite(x.view()))
        && d.iter().all(|x| all_finite(x.view()));
    if !finite {
        return Err(Error::Divergence {
            iteration: state.k + 1,
            last_finite: Box::new(state.clone()),
        });
    }

    state.u = u;
    state.v = v;
    state.d = d;
    state.hu = hu;
    state.k += 1;
    if config.snapshot_iterates {
        state.snapshots.push(state.u.clone());
    }

    let record = measure(state, split)?;
    state.history.push(record);
    if !config.record_history && state.history.len() > STAGNATION_WINDOW + 1 {
        state.history.remove(0);
    }
    Ok(())
}

fn measure(state: &SolverState, split: &SplitSpec<'_>) -> Result<IterationRecord> {
    let mut objective = 0.0;
    let mut constraint_sq = 0.0;
    let mut residual_sq = 0.0;
    for (b, (h, v)) in split.blocks.iter().zip(state.hu.iter().zip(&state.v)) {
        match b.function.role() {
            Role::Penalty => objective += b.function.measure(h.view()),
            Role::Constraint => constraint_sq += b.function.measure(h.view()).powi(2),
        }
        residual_sq += distance(h.view(), v.view()).powi(2);
    }
    let mse = match &split.truth {
        Some((truth, to_image)) => {
            let est = to_image(state.u.view())?;
            Some(norm_sq((&est - truth).view()) / truth.len() as f64)
        }
        None => None,
    };
    Ok(IterationRecord {
        k: state.k,
        objective,
        constraint_norm: constraint_sq.sqrt(),
        primal_residual: residual_sq.sqrt(),
        wall_time: state.elapsed(),
        mse,
    })
}
