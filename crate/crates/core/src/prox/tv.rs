//! Isotropic total variation with forward differences and replicate
//! (Neumann) edges, and Chambolle's dual fixed-point denoiser.

use ndarray::{Array2, ArrayView2, Zip};

use super::TvSettings;
use crate::error::{Error, Result};

/// Dual field p = (p_rows, p_cols) of the TV denoiser.
#[derive(Debug, Clone, PartialEq)]
pub struct TvDual {
    pub rows: Array2<f64>,
    pub cols: Array2<f64>,
}

impl TvDual {
    pub fn zeros(shape: (usize, usize)) -> Self {
        TvDual {
            rows: Array2::zeros(shape),
            cols: Array2::zeros(shape),
        }
    }
}

/// Σ_ij √((Δᵢx)² + (Δⱼx)²) with the difference across the last row/column
/// taken as zero.
pub fn tv_norm(x: ArrayView2<f64>) -> f64 {
    let (h, w) = x.dim();
    let mut total = 0.0;
    for i in 0..h {
        for j in 0..w {
            let dv = if i + 1 < h { x[[i + 1, j]] - x[[i, j]] } else { 0.0 };
            let dh = if j + 1 < w { x[[i, j + 1]] - x[[i, j]] } else { 0.0 };
            total += (dv * dv + dh * dh).sqrt();
        }
    }
    total
}

pub(crate) fn gradient(x: ArrayView2<f64>, rows: &mut Array2<f64>, cols: &mut Array2<f64>) {
    let (h, w) = x.dim();
    for i in 0..h {
        for j in 0..w {
            rows[[i, j]] = if i + 1 < h { x[[i + 1, j]] - x[[i, j]] } else { 0.0 };
            cols[[i, j]] = if j + 1 < w { x[[i, j + 1]] - x[[i, j]] } else { 0.0 };
        }
    }
}

/// div = −∇ᵀ, so ⟨∇x, p⟩ = −⟨x, div p⟩.
pub(crate) fn divergence(rows: &Array2<f64>, cols: &Array2<f64>, out: &mut Array2<f64>) {
    let (h, w) = rows.dim();
    for i in 0..h {
        for j in 0..w {
            let mut d = 0.0;
            if i + 1 < h {
                d += rows[[i, j]];
            }
            if i > 0 {
                d -= rows[[i - 1, j]];
            }
            if j + 1 < w {
                d += cols[[i, j]];
            }
            if j > 0 {
                d -= cols[[i, j - 1]];
            }
            out[[i, j]] = d;
        }
    }
}

/// Approximates argmin_x ½‖x − v‖² + τ TV(x) with exactly
/// `settings.inner_iterations` Chambolle steps from a zero dual field.
pub fn tv_prox(v: ArrayView2<f64>, tau: f64, settings: &TvSettings) -> Result<Array2<f64>> {
    let mut dual = TvDual::zeros(v.dim());
    tv_prox_warm(v, tau, settings, &mut dual)
}

/// As [`tv_prox`], starting from (and updating) a caller-held dual field.
pub fn tv_prox_warm(
    v: ArrayView2<f64>,
    tau: f64,
    settings: &TvSettings,
    dual: &mut TvDual,
) -> Result<Array2<f64>> {
    if !(tau >= 0.0) {
        return Err(Error::domain(format!("TV weight must be non-negative, got {tau}")));
    }
    if !(settings.dual_step > 0.0) {
        return Err(Error::domain("TV dual step must be positive"));
    }
    if dual.rows.dim() != v.dim() || dual.cols.dim() != v.dim() {
        return Err(Error::shape(
            "TV dual field",
            format!("{:?}", v.dim()),
            format!("{:?}", dual.rows.dim()),
        ));
    }
    if tau == 0.0 {
        return Ok(v.to_owned());
    }

    let shape = v.dim();
    let step = settings.dual_step;
    let inv_tau = 1.0 / tau;
    let mut div = Array2::zeros(shape);
    let mut grow = Array2::zeros(shape);
    let mut gcol = Array2::zeros(shape);

    for _ in 0..settings.inner_iterations {
        divergence(&dual.rows, &dual.cols, &mut div);
        Zip::from(&mut div).and(&v).for_each(|d, &v| *d -= v * inv_tau);
        gradient(div.view(), &mut grow, &mut gcol);
        Zip::from(&mut dual.rows)
            .and(&mut dual.cols)
            .and(&grow)
            .and(&gcol)
            .for_each(|pr, pc, &gr, &gc| {
                let denom = 1.0 + step * (gr * gr + gc * gc).sqrt();
                *pr = (*pr + step * gr) / denom;
                *pc = (*pc + step * gc) / denom;
            });
    }

    divergence(&dual.rows, &dual.cols, &mut div);
    let mut out = v.to_owned();
    Zip::from(&mut out).and(&div).for_each(|x, &d| *x -= tau * d);
    Ok(out)
}
