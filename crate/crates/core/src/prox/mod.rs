//! Moreau proximal maps Ψ_{τφ}(v) = argmin_x ½‖x − v‖² + τ φ(x) for the
//! supported regularizers, and the projection onto the ε-ball that is the
//! proximal map of the feasibility indicator.

mod ball;
mod tv;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

pub use ball::BallConstraint;
pub use tv::{tv_norm, tv_prox, tv_prox_warm, TvDual};

use crate::error::{Error, Result};

pub const DEFAULT_DUAL_STEP: f64 = 0.248;

/// Whether a block function contributes to the objective or encodes a
/// constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Penalty,
    Constraint,
}

/// A closed proper convex function with a computable proximal map, used as
/// one g_j block of the split solver.
pub trait ProximalFunction: Send {
    /// argmin_v g(v)/μ + ½‖v − s‖².
    fn prox(&mut self, s: ArrayView1<f64>, mu: f64) -> Result<Array1<f64>>;

    fn role(&self) -> Role;

    /// g(v) for penalties; the distance to the feasible set's centre for
    /// constraints.
    fn measure(&self, v: ArrayView1<f64>) -> f64;
}

/// Settings of the Chambolle TV denoiser.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TvSettings {
    pub inner_iterations: usize,
    pub dual_step: f64,
    /// Reuse the dual field from the previous call of the same block.
    pub warm_start: bool,
}

impl TvSettings {
    pub fn new(inner_iterations: usize) -> Self {
        TvSettings {
            inner_iterations,
            dual_step: DEFAULT_DUAL_STEP,
            warm_start: false,
        }
    }
}

/// φ together with its proximal map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regularizer {
    L1,
    IsotropicTv(TvSettings),
}

impl Regularizer {
    pub fn tv(inner_iterations: usize) -> Self {
        Regularizer::IsotropicTv(TvSettings::new(inner_iterations))
    }

    /// φ(v). `shape` is the image shape needed by TV.
    pub fn evaluate(&self, v: ArrayView1<f64>, shape: Option<(usize, usize)>) -> Result<f64> {
        match self {
            Regularizer::L1 => Ok(v.iter().map(|x| x.abs()).sum()),
            Regularizer::IsotropicTv(_) => {
                let img = as_image(v, shape)?;
                Ok(tv_norm(img))
            }
        }
    }

    /// Ψ_{τφ}(v).
    pub fn prox(&self, v: ArrayView1<f64>, tau: f64, shape: Option<(usize, usize)>) -> Result<Array1<f64>> {
        match self {
            Regularizer::L1 => soft_threshold(v, tau),
            Regularizer::IsotropicTv(settings) => {
                let img = as_image(v, shape)?;
                let out = tv_prox(img, tau, settings)?;
                Ok(crate::operators::flatten(out))
            }
        }
    }
}

fn as_image(v: ArrayView1<'_, f64>, shape: Option<(usize, usize)>) -> Result<ndarray::ArrayView2<'_, f64>> {
    let shape = shape.ok_or_else(|| Error::domain("total variation needs an image shape"))?;
    v.into_shape_with_order(shape)
        .map_err(|_| Error::shape("TV image", shape.0 * shape.1, v.len()))
}

/// sign(y)·max(|y| − τ, 0) applied componentwise.
pub fn soft_threshold(v: ArrayView1<f64>, tau: f64) -> Result<Array1<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("threshold must be non-negative, got {tau}")));
    }
    Ok(v.mapv(|y| shrink(y, tau)))
}

#[inline]
pub fn shrink(y: f64, tau: f64) -> f64 {
    let mag = y.abs() - tau;
    if mag > 0.0 {
        mag.copysign(y)
    } else {
        0.0
    }
}

/// The ℓ1 norm as a penalty block.
#[derive(Debug, Clone, Copy, Default)]
pub struct L1Norm;

impl ProximalFunction for L1Norm {
    fn prox(&mut self, s: ArrayView1<f64>, mu: f64) -> Result<Array1<f64>> {
        soft_threshold(s, 1.0 / mu)
    }
    fn role(&self) -> Role {
        Role::Penalty
    }
    fn measure(&self, v: ArrayView1<f64>) -> f64 {
        v.iter().map(|x| x.abs()).sum()
    }
}

/// g ≡ 0; its proximal map is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ProximalFunction for Zero {
    fn prox(&mut self, s: ArrayView1<f64>, _mu: f64) -> Result<Array1<f64>> {
        Ok(s.to_owned())
    }
    fn role(&self) -> Role {
        Role::Penalty
    }
    fn measure(&self, _v: ArrayView1<f64>) -> f64 {
        0.0
    }
}

/// Isotropic TV on images of a fixed shape, with an optional dual field
/// carried across calls.
#[derive(Debug, Clone)]
pub struct TotalVariation {
    settings: TvSettings,
    shape: (usize, usize),
    dual: Option<TvDual>,
}

impl TotalVariation {
    pub fn new(settings: TvSettings, shape: (usize, usize)) -> Self {
        TotalVariation {
            settings,
            shape,
            dual: None,
        }
    }
}

impl ProximalFunction for TotalVariation {
    fn prox(&mut self, s: ArrayView1<f64>, mu: f64) -> Result<Array1<f64>> {
        let img = as_image(s, Some(self.shape))?;
        let out = if self.settings.warm_start {
            let dual = self.dual.get_or_insert_with(|| TvDual::zeros(self.shape));
            tv_prox_warm(img, 1.0 / mu, &self.settings, dual)?
        } else {
            tv_prox(img, 1.0 / mu, &self.settings)?
        };
        Ok(crate::operators::flatten(out))
    }
    fn role(&self) -> Role {
        Role::Penalty
    }
    fn measure(&self, v: ArrayView1<f64>) -> f64 {
        as_image(v, Some(self.shape)).map(tv_norm).unwrap_or(f64::NAN)
    }
}
